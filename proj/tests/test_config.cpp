#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hjb/config_reader.hpp"
#include "hjb/errors.hpp"
#include "hjb/experiment.hpp"

using namespace hjb;

TEST_CASE("scalars and sections") {
  auto doc = ConfigDocument::parse(R"(
top = 1
# comment
[a]
x = 1.5e-3     # trailing
n = 1_000
flag = true
name = "hello # not a comment"
lit = 'raw\n'
"quoted key" = -2

[b]
)");
  CHECK(doc.number("", "top", 0) == 1);
  CHECK(doc.number("a", "x", 0) == 1.5e-3);
  CHECK(doc.integer("a", "n", 0) == 1000);
  CHECK(doc.boolean("a", "flag", false));
  CHECK(doc.string("a", "name", "") == "hello # not a comment");
  CHECK(doc.string("a", "lit", "") == "raw\\n");
  CHECK(doc.number("a", "quoted key", 0) == -2);
  CHECK(doc.has_section("b"));
  CHECK(doc.sections() == std::vector<std::string>{"", "a", "b"});
  CHECK(ConfigDocument::parse("[a]\n").sections() == std::vector<std::string>{"a"});
  CHECK(doc.number("b", "missing", 7.0) == 7.0);
  CHECK_FALSE(doc.has("a", "missing"));
}

TEST_CASE("arrays") {
  auto doc = ConfigDocument::parse(R"(
[s]
xs = [1, 2.5, 1e-3]
multi = [
  1,  # one
  2,
]
names = ["lp", "kernel"]
nested = [[1, 2], [3]]
single = 4
)");
  CHECK(doc.numbers("s", "xs", {}) == std::vector<double>{1, 2.5, 1e-3});
  CHECK(doc.integers("s", "multi", {}) == std::vector<int>{1, 2});
  CHECK(doc.strings("s", "names", {}) == std::vector<std::string>{"lp", "kernel"});
  CHECK(doc.at("s", "nested").items.size() == 2);
  CHECK(doc.at("s", "nested").items[0].items[1].number == 2);
  CHECK(doc.numbers("s", "single", {}) == std::vector<double>{4});
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(ConfigDocument::parse("[a]\nx = 1\nx = 2\n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("[a]\n[a]\n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = \n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = [1, 2\n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = \"open\n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("[a\n"), ParameterError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = 1.2.3\n"), ParameterError);
  try {
    ConfigDocument::parse("a = 1\n\nb = @\n");
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/x.toml"), IoError);
  auto doc = ConfigDocument::parse("[a]\nx = \"s\"\n");
  CHECK_THROWS_AS(doc.number("a", "x", 0), ParameterError);
  CHECK_THROWS_AS(doc.integer("a", "x", 0), ParameterError);
}

TEST_CASE("experiment defaults") {
  auto cfg = ExperimentConfig::from_document(ConfigDocument::parse(""));
  CHECK(cfg.n_t == 20);
  CHECK(cfg.sweep == std::vector<int>{5, 10, 15, 20});
  CHECK(cfg.epsilon == 1e-4);
  CHECK(cfg.eta == 0.0);
  CHECK(cfg.m_t == 10);
  CHECK(cfg.q_t == 5);
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.problem.kind == "lqr_double_integrator");
  CHECK(cfg.kernel.kind == KernelKind::control_affine);
  CHECK(cfg.kernel.u_scale == 100.0);
}

TEST_CASE("experiment config from text") {
  auto cfg = ExperimentConfig::from_document(ConfigDocument::parse(R"(
[problem]
kind = "example1"
[sampling]
n_t = 4
n_x = [1]
[solver]
epsilon = 1e-3
step_rule = "backtracking"
[sweep]
methods = ["lp"]
lp_lambda_theta = [1e-8]
lp_gamma = 1e8
[output]
workers = 2
record_timing = false
)"));
  CHECK(cfg.problem.kind == "example1");
  CHECK(cfg.basis == "linear_decay");
  CHECK(cfg.n_t == 4);
  CHECK(cfg.sweep == std::vector<int>{1});
  CHECK(cfg.step_rule == StepRule::backtracking);
  CHECK(cfg.methods == std::vector<Method>{Method::lp});
  CHECK(cfg.lp_grid.gamma == std::vector<double>{1e8});
  CHECK(cfg.workers == 2);
  CHECK_FALSE(cfg.record_timing);
}

TEST_CASE("experiment config rejects bad values") {
  auto bad = [](const char* text) {
    return ExperimentConfig::from_document(ConfigDocument::parse(text));
  };
  CHECK_THROWS_AS(bad("[nonsense]\n"), ParameterError);
  CHECK_THROWS_AS(bad("[solver]\ntypo = 1\n"), ParameterError);
  CHECK_THROWS_AS(bad("[sweep]\nmethods = [\"qp\"]\n"), ParameterError);
  CHECK_THROWS_AS(bad("[sweep]\nkernel_gamma = [-1]\n"), ParameterError);
  CHECK_THROWS_AS(bad("[sweep]\nlp_gamma = []\n"), ParameterError);
  CHECK_THROWS_AS(bad("[sampling]\nn_x = [0]\n"), ParameterError);
  CHECK_THROWS_AS(bad("[solver]\nepsilon = 0\n"), ParameterError);
  CHECK_THROWS_AS(bad("[kernel]\nkind = \"rbf\"\n"), ParameterError);
  CHECK_THROWS_AS(bad("[problem]\nkind = \"pendulum\"\n"), ParameterError);
  CHECK_THROWS_AS(bad("[output]\nworkers = 0\n"), ParameterError);
  CHECK_THROWS_AS(bad("[basis]\nkind = \"fourier\"\n"), ParameterError);
}

TEST_CASE("method names") {
  for (Method m : {Method::lp, Method::guided, Method::kernel})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("sdp"), ParameterError);
}
