#include <fstream>
#include <sstream>

#include "crawlq/arrivals.hpp"
#include "crawlq/error.hpp"
#include "crawlq/model_file.hpp"
#include "doctest.h"

using namespace crawlq;

namespace {

std::string read_fixture(const char* name) {
    std::ifstream in(std::string(CRAWLQ_MODEL_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kExp = R"("service": {"init": [1], "subgen": [[-1]]}, "obsolescence": {"init": [1], "subgen": [[-1]]})";

std::string doc(const std::string& arrival, const std::string& extra = "") {
    return std::string("{\"K\": 3, \"arrival\": ") + arrival + ", " + kExp + extra + "}";
}

void same_model(const QueueModel& a, const QueueModel& b) {
    REQUIRE(a.arrival.count() == b.arrival.count());
    CHECK(a.capacity == b.capacity);
    for (int r = 1; r <= a.arrival.count(); ++r) {
        const auto& x = a.arrival.mode(r).matrices();
        const auto& y = b.arrival.mode(r).matrices();
        REQUIRE(x.size() == y.size());
        for (size_t k = 0; k < x.size(); ++k) CHECK(x[k] == y[k]);
    }
    CHECK(a.service.init() == b.service.init());
    CHECK(a.service.subgen() == b.service.subgen());
    CHECK(a.obsolescence.subgen() == b.obsolescence.subgen());
}

}  // namespace

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_model("not json"), ValidationError);
    CHECK_THROWS_AS(parse_model(doc(R"({"kind": "direct", "modes": [[[[-1]], [[1]]]]})", R"(, "colour": 1)")),
                    ValidationError);
    CHECK_THROWS_AS(parse_model(doc(R"({"kind": "magic"})")), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"K": 3})"), ValidationError);
    try {
        parse_model(doc(R"({"kind": "direct", "modes": [[[[-1]], [[1]]]], "extra": 0})", R"(, "colour": 1)"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.issues().size() >= 2);
    }
}

TEST_CASE("all arrival kinds load") {
    const auto direct = build_model(parse_model(doc(R"({"kind": "direct", "modes": [[[[-1]], [[1]]], [[[-2]], [[2]]]]})")));
    CHECK(direct.model.arrival.count() == 2);
    const auto indep = build_model(parse_model(doc(R"({"kind": "independent", "processes": [[[[-1]], [[1]]], [[[-2]], [[2]]]]})")));
    CHECK(arrival_stats(indep.model.arrival.mode(2)).lambda == doctest::Approx(3.0));
    const auto thin = build_model(parse_model(doc(R"({"kind": "thinned", "process": [[[-2]], [[2]]], "q": [0.25, 1]})")));
    CHECK(arrival_stats(thin.model.arrival.mode(1)).lambda == doctest::Approx(0.5));
    const auto marked = build_model(parse_model(doc(R"({"kind": "bmmap", "D0": [[-2]], "robots": [[[[1]]], [[[0]], [[1]]]]})")));
    CHECK(marked.model.arrival.count() == 2);
    CHECK(arrival_stats(marked.model.arrival.mode(2)).lambda == doctest::Approx(3.0));
}

TEST_CASE("pristine first example needs repair") {
    const auto spec = parse_model(read_fixture("example1.json"));
    CHECK(spec.validation == ValidationMode::Repair);
    try {
        build_model(spec, ValidationMode::Strict);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        std::string all;
        for (const auto& s : e.issues()) all += s + "\n";
        CHECK(all.find("mode 2") != std::string::npos);
        CHECK(all.find("mode 3") != std::string::npos);
        CHECK(all.find("mode 1") == std::string::npos);
    }
    const auto lm = build_model(spec);
    CHECK(!lm.repair_log.empty());
    REQUIRE(lm.costs.has_value());
    CHECK(lm.costs->c_star == 300.0);
}

TEST_CASE("canonical emission round-trips") {
    for (const char* name : {"example1.json", "table5.json", "mm1_2.json"}) {
        const auto lm = load_model_file(std::string(CRAWLQ_MODEL_DIR) + "/" + name);
        const std::string text = emit_model(lm.canonical);
        const auto spec = parse_model(text);
        CHECK(spec.validation == ValidationMode::Strict);
        const auto again = build_model(spec);
        CHECK(again.repair_log.empty());
        same_model(lm.model, again.model);
        CHECK(emit_model(again.canonical) == text);
    }
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), ValidationError);
}
