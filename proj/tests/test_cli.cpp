#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rbm/cli.hpp"
#include "rbm/hermite.hpp"
#include "rbm/version.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = rbm::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("cli prob") {
    Run r = run({"prob", "--t", "1", "--indices", "1", "--levels", "0", "--a", "0"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == rbm::kReportSchema);
    CHECK(j["version"] == rbm::kVersion);
    CHECK(j["command"] == "prob");
    CHECK(j["config"]["quad_order"] == 40);
    CHECK(j["config"]["initial_data"]["source"] == "levels");
    CHECK(std::abs(j["result"]["probability"].get<double>() - 0.5) < 1e-6);
    CHECK(j["result"].contains("error_estimate"));

    Run g = run({"prob", "--indices", "1", "--levels", "0", "--a", "1.3", "--output", "csv"});
    REQUIRE(g.code == 0);
    CHECK(g.out.rfind("probability,error_estimate,order_used,truncation_length\n", 0) == 0);
    const double p = std::stod(g.out.substr(g.out.find('\n') + 1));
    CHECK(std::abs(p - (1.0 - rbm::normal_cdf(1.3))) < 1e-6);

    Run w = run({"prob", "--wedges", "0,-0.5@0.25", "--indices", "5", "--a", "-2"});
    REQUIRE(w.code == 0);
    CHECK(json::parse(w.out)["config"]["initial_data"]["infinite_prefix"] == 0);
}

TEST_CASE("cli errors and exit codes") {
    CHECK(run({"prob", "--indices", "1", "--levels", "0", "--a", "0,1"}).code == 2);
    CHECK(run({"prob", "--indices", "1", "--a", "0"}).code == 2);
    CHECK(run({"prob", "--indices", "1", "--levels", "0", "--wedges", "0@0.1", "--a", "0"}).code == 2);
    CHECK(run({"prob", "--indices", "1", "--levels", "0", "--a", "zero"}).code == 2);
    CHECK(run({"prob", "--indices", "1", "--levels", "0", "--a", "0", "--output", "xml"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    Run io = run({"prob", "--init-csv", temp_path("rbm-no-such-file.csv"), "--indices", "1", "--a", "0"});
    CHECK(io.code == 4);
    CHECK_FALSE(io.err.empty());
    CHECK(run({"prob", "--levels", "0,-1", "--indices", "2", "--a", "0", "--target", "1e-300", "--max-refinements", "0"})
              .code == 3);
    CHECK(run({"prob", "--config", temp_path("rbm-no-such-config.txt"), "--indices", "1", "--a", "0"}).code == 4);
}

TEST_CASE("cli validate") {
    Run r = run({"validate", "--suite", "duality", "--seed", "7"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["result"]["all_passed"] == true);
    CHECK(j["result"]["suites"][0]["max_error"].get<double>() < 1e-12);
    CHECK(run({"validate", "--suite", "contour", "--output", "csv"}).out.rfind("suite,max_error", 0) == 0);
    CHECK(run({"validate", "--suite", "nope"}).code == 2);
}

TEST_CASE("cli reproducibility and config file") {
    const std::vector<std::string> args{"mc", "--levels", "0,0", "--indices", "2", "--a", "-1", "--paths", "3000", "--dt", "0.01", "--seed", "5"};
    Run a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto one = args, two = args;
    one.insert(one.end(), {"--threads", "1"});
    two.insert(two.end(), {"--threads", "3"});
    CHECK(json::parse(run(one).out)["result"] == json::parse(run(two).out)["result"]);
    CHECK(json::parse(a.out)["config"]["seed"] == 5);

    const std::string path = temp_path("rbm-cli-config.txt");
    {
        std::ofstream f(path);
        f << "# defaults for a sweep\nlevels = 0\nindices=1\na = 0.5\nquad-order = 30\n";
    }
    Run c = run({"prob", "--config", path});
    REQUIRE(c.code == 0);
    json jc = json::parse(c.out);
    CHECK(jc["config"]["quad_order"] == 30);
    CHECK(std::abs(jc["result"]["probability"].get<double>() - (1.0 - rbm::normal_cdf(0.5))) < 1e-6);
    Run o = run({"prob", "--config", path, "--a", "-0.5"});
    REQUIRE(o.code == 0);
    CHECK(std::abs(json::parse(o.out)["result"]["probability"].get<double>() - rbm::normal_cdf(0.5)) < 1e-6);
    std::remove(path.c_str());
}

TEST_CASE("cli hitting, scaling and gue") {
    Run h = run({"hitting", "--levels", "0,-1,-1,-2", "--eta", "0.5", "--output", "csv"});
    REQUIRE(h.code == 0);
    CHECK(h.out == "ell,b,density\natom,0.5,1\n");
    Run hj = run({"hitting", "--levels", "0,-1,-1,-2", "--eta", "-0.5"});
    REQUIRE(hj.code == 0);
    CHECK(json::parse(hj.out)["result"]["components"].size() == 2);

    Run s = run({"scaling", "--wedges", "0", "--x", "0.6", "--a", "0", "--eps", "1,0.1", "--output", "csv"});
    REQUIRE(s.code == 0);
    std::istringstream lines(s.out);
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header == "eps,prob_rbm,prob_fp,abs_err,det_err_rbm,det_err_fp");
    CHECK(first == "1,,,,,");
    CHECK(second.rfind("0.1,", 0) == 0);

    Run g = run({"gue", "--sizes", "2", "--a", "-1,0", "--paths", "4000", "--seed", "3"});
    REQUIRE(g.code == 0);
    json jg = json::parse(g.out);
    CHECK(jg["result"]["rows"].size() == 2);
    CHECK(jg["config"]["samples"] == 4000);
}
