#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef TRIAX_CLI_BIN
#error "TRIAX_CLI_BIN must be defined by the build"
#endif
#ifndef TRIAX_MODELS_DIR
#error "TRIAX_MODELS_DIR must be defined by the build"
#endif

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout (plus whatever the command
/// redirects into it) and the exit status.
RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  int rc = pclose(pipe);
  if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
  return r;
}

std::string bin() { return std::string("\"") + TRIAX_CLI_BIN + "\""; }

std::string model(const std::string& name) {
  return std::string("\"") + TRIAX_MODELS_DIR + "/" + name + "\"";
}

std::string tmp_dir() {
  const char* t = std::getenv("TMPDIR");
  return t ? t : "/tmp";
}

std::string write_temp_model(const std::string& name, const std::string& text) {
  std::string path = tmp_dir() + "/" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("validate accepts a sound model and reports its profile") {
  RunResult r = run(bin() + " validate --model " + model("bivariate.model") + " 2>/dev/null");
  REQUIRE(r.status == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["accepted"].get<bool>());
  CHECK(j["conditions"].size() == 8);
  CHECK(j["profile"]["tilde_alpha"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("validate exits 1 on a failing model and lists the conditions") {
  std::string path = write_temp_model("cli_zero_b.model",
                                      "dim = 1\nA[1][1] = lognormal(-1,1)\nB[1] = zero\n");
  RunResult r = run(bin() + " validate --model \"" + path + "\" 2>&1");
  CHECK(r.status == 1);
  CHECK(r.out.find("T-2") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("indices prints the five-coordinate golden profile") {
  RunResult r = run(bin() + " indices --model " + model("example34.model") + " 2>/dev/null");
  REQUIRE(r.status == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["tilde_alpha"] == nlohmann::json({1.0, 1.0, 2.0, 1.0, 4.0}));
  CHECK(j["j0"] == nlohmann::json({4, 4, 3, 4, 5}));
}

TEST_CASE("simulate emits a deterministic batch") {
  std::string cmd = bin() + " simulate --model " + model("diag2.model") +
                    " --paths 10 --burnin 50 2>/dev/null";
  RunResult a = run(cmd);
  REQUIRE(a.status == 0);
  CHECK(a.out.rfind("w_1,w_2\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 11);
  RunResult b = run(cmd);
  CHECK(a.out == b.out);
}

TEST_CASE("worker count and environment override leave output unchanged") {
  std::string base = bin() + " estimate --model " + model("diag2.model") +
                     " --paths 3000 --burnin 100";
  RunResult w1 = run(base + " --workers 1 2>/dev/null");
  RunResult w4 = run(base + " --workers 4 2>/dev/null");
  REQUIRE(w1.status == 0);
  CHECK(w1.out == w4.out);
  RunResult env = run("TRIAX_WORKERS=4 " + base + " 2>/dev/null");
  CHECK(env.status == 0);
  CHECK(env.out == w1.out);
  nlohmann::json j = nlohmann::json::parse(w1.out);
  CHECK(j.size() == 4);  // hill + rank regression per coordinate
  CHECK(j[0]["method"] == "hill");
  CHECK(j[1]["method"] == "rank_regression");
}

TEST_CASE("estimate writes artifacts next to the requested output") {
  std::string stem = tmp_dir() + "/cli_estimate_out";
  std::string out = stem + ".json";
  RunResult r = run(bin() + " estimate --model " + model("d1_lognormal.model") +
                    " --paths 4000 --out \"" + out + "\" 2>/dev/null");
  REQUIRE(r.status == 0);
  std::ifstream json_in(out);
  REQUIRE(json_in.good());
  std::ifstream surv(stem + "_survival_1.csv");
  REQUIRE(surv.good());
  std::string header;
  std::getline(surv, header);
  CHECK(header == "x,x_pow_alpha_times_survival");
  std::remove(out.c_str());
  std::remove((stem + "_survival_1.csv").c_str());
}

TEST_CASE("decompose emits traces and a tail summary") {
  RunResult r = run(bin() + " decompose --model " + model("triangular3.model") +
                    " --coord 1 --paths 5 --s 6 2>/dev/null");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("path_id,s,Q_F,Q_T,Q_W,Q_B,QpW,QppW,QstarW,R,pi_lj0,W_j0_ms,W_l_0\n", 0) ==
        0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
  RunResult err = run(bin() + " decompose --model " + model("triangular3.model") +
                      " --coord 1 --paths 5 --s 6 2>&1 1>/dev/null");
  CHECK(err.out.find("mean |R|^") != std::string::npos);
}

TEST_CASE("useq emits the factor sequence and a convergence note") {
  RunResult r = run(bin() + " useq --model " + model("bivariate.model") +
                    " --coord 1 --paths 300 --s 12 2>/dev/null");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("s,u_estimate,std_error\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 13);
  RunResult err = run(bin() + " useq --model " + model("bivariate.model") +
                      " --coord 1 --paths 300 --s 12 2>&1 1>/dev/null");
  CHECK(err.out.find("pathwise_monotone = true") != std::string::npos);
}

TEST_CASE("constants chains dominated coordinates to their anchors") {
  RunResult r = run(bin() + " constants --model " + model("bivariate.model") +
                    " --paths 800 --s 12 2>/dev/null");
  REQUIRE(r.status == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["method"] == "recursive u*C");
  CHECK(j[0]["chain"] == "C_1 = u_1 * C_2");
  CHECK(j[0].contains("u"));
  CHECK(j[1]["method"] == "goldie-direct");
  CHECK(j[1]["constant"].get<double>() > 0.0);
}

TEST_CASE("lyapunov reports the bound and the Monte Carlo exponent") {
  RunResult r = run(bin() + " lyapunov --model " + model("d1_lognormal.model") +
                    " --paths 300 --s 300 2>/dev/null");
  REQUIRE(r.status == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["sufficient"].get<bool>());
  CHECK(j["mc"]["estimate"].get<double>() < -0.8);
  CHECK(j["mc"]["estimate"].get<double>() > -1.2);
}

TEST_CASE("garch simulates returns and optionally chains Hill") {
  RunResult r = run(bin() + " garch --model " + model("garch2d.model") + " --s 500 2>/dev/null");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("t,X_1,X_2,sigma2_1,sigma2_2\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 501);

  RunResult chained = run(bin() + " garch --model " + model("garch2d.model") +
                          " --s 2000 --k 100 2>&1 1>/dev/null");
  CHECK(chained.status == 0);
  CHECK(chained.out.find("\"method\": \"hill\"") != std::string::npos);

  RunResult wrong = run(bin() + " garch --model " + model("bivariate.model") + " 2>&1");
  CHECK(wrong.status == 1);
  CHECK(wrong.out.find("no garch section") != std::string::npos);
}

TEST_CASE("exit codes separate input failures from numeric failures") {
  RunResult missing = run(bin() + " indices --model /no/such.model 2>/dev/null");
  CHECK(missing.status == 1);

  std::string path = write_temp_model("cli_no_root.model",
                                      "dim = 1\nA[1][1] = constant(0.5)\nB[1] = constant(1)\n");
  RunResult numeric = run(bin() + " indices --model \"" + path + "\" 2>&1");
  CHECK(numeric.status == 2);
  CHECK(numeric.out.find("NO_ROOT") != std::string::npos);
  std::remove(path.c_str());

  RunResult nocmd = run(bin() + " 2>/dev/null");
  CHECK(nocmd.status == 1);
  RunResult badflag = run(bin() + " indices --nope 2>/dev/null");
  CHECK(badflag.status == 1);
}
