#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <sstream>

#include "extlm/codec.hpp"
#include "extlm/mdl.hpp"
#include "extlm/select.hpp"
#include "test_util.hpp"

using namespace extlm;

TEST_CASE("quantized tables are well formed") {
    std::vector<double> dist{0.5, 0.25, 0.25};
    auto cum = quantize_distribution(dist);
    REQUIRE(cum.size() == 4);
    CHECK(cum[0] == 0);
    CHECK(cum[3] == 65536);
    CHECK(cum[1] == 32768);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cum[i + 1] > cum[i]);

    // tiny probabilities keep at least one quantum
    std::vector<double> skew{1.0 - 1e-9, 1e-9};
    auto cs = quantize_distribution(skew);
    CHECK(cs[2] - cs[1] >= 1);
    CHECK(cs[2] == 65536);
}

TEST_CASE("round trip on the worked model") {
    ExtensionModel model = testutil::example_one_model();
    SymbolSequence seq{0, 1, 0, 0, 1, 0, 0, 0};
    CodedStream stream = encode(model, seq);
    CHECK(decode(model, stream) == seq);
}

TEST_CASE("round trip across random models and sequences") {
    std::mt19937 rng(97);
    for (int round = 0; round < 150; ++round) {
        std::size_t m = 2 + rng() % 3;
        ExtensionModel model = testutil::random_valid_model(rng, m, 6);
        SymbolSequence seq = testutil::random_sequence(rng, m, rng() % 300);
        CodedStream stream = encode(model, seq);
        CHECK(decode(model, stream) == seq);
    }
}

TEST_CASE("uniform coding achieves one bit per symbol plus slack") {
    ExtensionModel model(testutil::small_alphabet(2));
    model.add_context({}, 2, 0, 2, {{0, 1}, {1, 1}});
    model.finalize();
    std::mt19937 rng(101);
    SymbolSequence seq = testutil::random_sequence(rng, 2, 1024);
    CodedStream stream = encode(model, seq);
    double ideal = model.log_prob_bits(seq);
    CHECK(ideal == doctest::Approx(1024.0));
    CHECK(stream.payload_bits() >= 1024);
    CHECK(stream.payload_bits() <= 1024 + 32 + static_cast<std::size_t>(0.001 * 1024) + 8);
}

TEST_CASE("short strings code near their ideal length") {
    ExtensionModel model = testutil::example_one_model();
    SymbolSequence ab{0, 1};  // ideal 3 bits
    CodedStream stream = encode(model, ab);
    CHECK(stream.payload_bits() <= std::ceil(model.log_prob_bits(ab)) + 32);
    CHECK(decode(model, stream) == ab);
}

TEST_CASE("empty sequence is a header-only stream") {
    ExtensionModel model = testutil::example_one_model();
    CodedStream stream = encode(model, {});
    CHECK(stream.symbol_count == 0);
    CHECK(stream.payload.empty());
    CHECK(decode(model, stream).empty());
}

TEST_CASE("decode refuses the wrong model") {
    ExtensionModel model = testutil::example_one_model();
    SymbolSequence seq{0, 0, 1};
    CodedStream stream = encode(model, seq);

    ExtensionModel other(testutil::small_alphabet(2));
    other.add_context({}, 4, 0, 2, {{0, 3}, {1, 1}});
    other.finalize();
    CHECK_THROWS_AS(decode(other, stream), std::invalid_argument);
}

TEST_CASE("encode refuses foreign symbols") {
    ExtensionModel model = testutil::example_one_model();
    SymbolSequence bad{0, 5};
    CHECK_THROWS_AS(encode(model, bad), std::invalid_argument);
}

TEST_CASE("stream file format round trip and truncation") {
    ExtensionModel model = testutil::example_one_model();
    SymbolSequence seq{0, 1, 0, 0};
    CodedStream stream = encode(model, seq);
    std::ostringstream out(std::ios::binary);
    write_stream(out, stream);
    std::string bytes = out.str();
    CHECK(bytes.substr(0, 5) == "EXMC1");
    CHECK(bytes.size() == 45 + stream.payload.size());

    std::istringstream in(bytes, std::ios::binary);
    CodedStream back = read_stream(in);
    CHECK(back.model_digest == stream.model_digest);
    CHECK(back.symbol_count == stream.symbol_count);
    CHECK(back.payload == stream.payload);
    CHECK(decode(model, back) == seq);

    std::istringstream bad_magic(std::string("EXMC9") + bytes.substr(5), std::ios::binary);
    CHECK_THROWS_AS(read_stream(bad_magic), std::invalid_argument);
    std::istringstream truncated(bytes.substr(0, 20), std::ios::binary);
    CHECK_THROWS_AS(read_stream(truncated), std::invalid_argument);
}

TEST_CASE("payload stays within the achievability envelope on text") {
    // estimate a small model from structured text and code held-out data
    Alphabet abc = testutil::small_alphabet(3);
    std::mt19937 rng(103);
    SymbolSequence seq;
    for (int i = 0; i < 6000; ++i) {
        Sym prev = seq.empty() ? 0 : seq.back();
        seq.push_back(rng() % 4 == 0 ? prev : static_cast<Sym>((prev + 1) % 3));
    }
    SelectionConfig cfg;
    cfg.max_order = 3;
    cfg.min_count = 4;
    FitResult res = fit(SymbolSequence(seq.begin(), seq.begin() + 5000), abc, cfg);
    SymbolSequence test(seq.begin() + 5000, seq.end());
    CodedStream stream = encode(res.model, test);
    double ideal = data_codelength(res.model, test);
    auto bound = static_cast<std::size_t>(std::ceil(ideal) + 32 + 0.001 * test.size());
    CHECK(stream.payload_bits() >= static_cast<std::size_t>(ideal));
    CHECK(stream.payload_bits() <= bound);
    CHECK(decode(res.model, stream) == test);
}
