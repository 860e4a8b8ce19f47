#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "isopair_lab/cli.hpp"

using namespace isopair_lab;
using namespace isopair_lab::cli;

namespace {

std::string data(const std::string &name) { return std::string(ISOPAIR_LAB_DATA_DIR) + "/" + name; }

struct Outcome {
  int code;
  Json body;
  std::string text;
};

Outcome exec(RunConfig cfg) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(cfg, out, err);
  return {code, Json::parse(out.str()), out.str()};
}

RunConfig command(const std::string &name) {
  RunConfig cfg;
  cfg.command = name;
  return cfg;
}

} // namespace

TEST(Cli, InnerToralVerdicts) {
  auto cfg = command("check-inner-toral");
  cfg.polys = {data("parabola.json")};
  const auto ok = exec(cfg);
  EXPECT_EQ(ok.code, kExitPass);
  EXPECT_TRUE(ok.body["inner_toral"]["pass"].get<bool>());

  cfg.polys = {data("hyperbola.json")};
  const auto bad = exec(cfg);
  EXPECT_EQ(bad.code, kExitCheckFailed);
  EXPECT_FALSE(bad.body["inner_toral"]["witnesses"].empty());
}

TEST(Cli, RankOfExemplar) {
  auto cfg = command("rank");
  cfg.colligation = data("exemplar_colligation.json");
  cfg.factors = data("exemplar_factors.json");
  const auto r = exec(cfg);
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.body["rank"]["alpha"], Json::array({1}));
  EXPECT_EQ(r.body["rank"]["bidegrees"], Json::parse("[[1,2]]"));
  EXPECT_TRUE(r.body["rank"]["checks"]["stability"].get<bool>());
}

TEST(Cli, RealizeRoundTrip) {
  auto cfg = command("realize");
  cfg.colligation = data("doubled_colligation.json");
  const auto r = exec(cfg);
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_LE(r.body["realize"]["held_out_transfer_error"].get<double>(), 1e-7);
  EXPECT_EQ(r.body["realize"]["N_recovered"], 2);
}

TEST(Cli, IdealQuotient) {
  auto cfg = command("ideal");
  cfg.polys = {data("parabola.json"), data("z.json")};
  const auto r = exec(cfg);
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.body["ideal"]["quotient_dim"], 2);
  EXPECT_EQ(r.body["ideal"]["normal_set"], Json::parse("[[0,0],[0,1]]"));

  cfg.polys = {data("parabola.json"), data("parabola.json")};
  EXPECT_EQ(exec(cfg).body["ideal"]["quotient_dim"], "INFINITE");

  cfg.polys = {data("parabola.json"), data("exact_z.json")};
  EXPECT_EQ(exec(cfg).body["ideal"]["quotient_dim"], 2);

  cfg.polys = {data("parabola.json")};
  EXPECT_EQ(exec(cfg).code, kExitInputError);
}

TEST(Cli, DefectWithTooFewGeneratorsFails) {
  auto cfg = command("defect");
  cfg.colligation = data("doubled_colligation.json");
  cfg.factors = data("exemplar_factors.json");
  const auto full = exec(cfg);
  EXPECT_EQ(full.code, kExitPass);
  EXPECT_EQ(full.body["defect"]["defect"], 0);
  cfg.generators = 1;
  const auto one = exec(cfg);
  EXPECT_EQ(one.code, kExitCheckFailed);
  EXPECT_FALSE(one.body["defect"]["stabilized"].get<bool>());
}

TEST(Cli, ReportOnBundles) {
  auto cfg = command("report");
  cfg.bundle = data("exemplar_bundle.json");
  const auto ok = exec(cfg);
  EXPECT_EQ(ok.code, kExitPass);
  for (const char *stage : {"inner_toral", "realize", "rank", "kernel", "defect"}) {
    EXPECT_EQ(ok.body["stages"][stage]["status"], "pass") << stage;
  }

  cfg.bundle = data("corrupted_p_bundle.json");
  const auto corrupt = exec(cfg);
  EXPECT_EQ(corrupt.code, kExitCheckFailed);
  EXPECT_EQ(corrupt.body["stages"]["kernel"]["status"], "fail");
  EXPECT_EQ(corrupt.body["stages"]["defect"]["status"], "skipped");

  cfg.bundle = data("exemplar_triple_bundle.json");
  EXPECT_EQ(exec(cfg).code, kExitPass);

  cfg.bundle = data("empty_bundle.json");
  EXPECT_EQ(exec(cfg).code, kExitInputError);

  cfg.bundle = data("inconsistent_bundle.json");
  EXPECT_EQ(exec(cfg).code, kExitInputError);
}

TEST(Cli, DirectSumReport) {
  auto cfg = command("report");
  cfg.bundle = data("diag_pm_bundle.json");
  const auto r = exec(cfg);
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.body["stages"]["rank"]["alpha"], Json::array({1, 1}));
  EXPECT_EQ(r.body["stages"]["defect"]["defect"], 1);
}

TEST(Cli, InputErrors) {
  auto cfg = command("check-inner-toral");
  cfg.polys = {data("malformed.json")};
  const auto bad = exec(cfg);
  EXPECT_EQ(bad.code, kExitInputError);
  EXPECT_NE(bad.body["error"].get<std::string>().find("byte"), std::string::npos);

  cfg.polys = {data("does_not_exist.json")};
  EXPECT_EQ(exec(cfg).code, kExitInputError);

  EXPECT_EQ(exec(command("frobnicate")).code, kExitInputError);

  auto tol = command("check-inner-toral");
  tol.polys = {data("parabola.json")};
  tol.tol = -1.0;
  EXPECT_EQ(exec(tol).code, kExitInputError);
}

TEST(Cli, OutputIsDeterministic) {
  auto cfg = command("report");
  cfg.bundle = data("diag_pm_bundle.json");
  cfg.seed = 5;
  EXPECT_EQ(exec(cfg).text, exec(cfg).text);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = ISOPAIR_LAB_CLI;
  const auto status = [&](const std::string &args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("check-inner-toral --poly " + data("parabola.json")), 0);
  EXPECT_EQ(status("check-inner-toral --poly " + data("steep_line.json")), 1);
  EXPECT_EQ(status("rank --colligation " + data("exemplar_colligation.json") + " --factors " +
                   data("exemplar_factors.json")),
            0);
  EXPECT_EQ(status("report --bundle " + data("empty_bundle.json")), 2);
  EXPECT_EQ(status("no-such-command"), 2);
  EXPECT_EQ(status("rank --truncation notanumber"), 2);
}
