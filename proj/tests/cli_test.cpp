// Copyright 2026 The gilbert-hsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "hsd/io.hpp"
#include "hsd/states.hpp"
#include "test_util.hpp"

using namespace hsd;
using namespace hsd::testing;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation hsd_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Invocation inv;
    inv.code = cli::run(args, out, err);
    inv.out = out.str();
    inv.err = err.str();
    return inv;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / "hsd_cli_test" / info->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, run_bell_reaches_envelope) {
    const Invocation inv =
        hsd_cli({"run", "--state", "bell", "--halt-cs", "1000", "--seed", "7", "--trace", path("t.csv")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const Trace trace = read_trace_csv(fs::path(path("t.csv")));
    ASSERT_EQ(trace.size(), 1000u);
    EXPECT_GE(trace.back().d2, 1.0 / 3.0);
    EXPECT_LE(trace.back().d2, 1.0 / 3.0 + 0.01);
    const auto meta = nlohmann::json::parse(inv.out);
    EXPECT_EQ(meta.at("state"), "bell");
    EXPECT_EQ(meta.at("dims"), nlohmann::json::array({2, 2}));
    EXPECT_EQ(meta.at("seed"), 7);
    EXPECT_EQ(meta.at("c_s"), 1000);
    EXPECT_EQ(meta.at("halt").at("max_successes"), 1000);
    EXPECT_EQ(meta.at("final_d2").get<double>(), trace.back().d2);
    EXPECT_EQ(meta.at("c_t").get<std::uint64_t>(), trace.back().c_t);
    EXPECT_TRUE(meta.contains("wall_seconds"));
}

TEST_F(CliTest, run_real_only_approaches_real_limit) {
    const Invocation inv = hsd_cli({"run", "--state", "bell", "--real-only", "--halt-cs", "2000", "--seed",
                                    "7", "--out-rho1", path("rho1.json")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const DensityMatrix rho1 = to_density(read_state_file(path("rho1.json")));
    EXPECT_LE(hsd_sq(rho1, real_limit_bell()), 0.01);
    EXPECT_EQ(nlohmann::json::parse(inv.out).at("mode"), "real");
}

TEST_F(CliTest, run_upb_smoke) {
    const Invocation inv = hsd_cli(
        {"run", "--state", "upb_tiles", "--halt-ct", "100000", "--seed", "1", "--trace", path("u.csv")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const Trace trace = read_trace_csv(fs::path(path("u.csv")));
    ASSERT_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LT(trace[i].d2, trace[i - 1].d2);
    EXPECT_EQ(nlohmann::json::parse(inv.out).at("c_t"), 100000);
}

TEST_F(CliTest, run_outputs_are_byte_stable) {
    const std::vector<std::string> base{"run", "--state", "ghz:3", "--halt-cs", "300", "--seed", "3"};
    auto with = [&](const std::string& tag) {
        std::vector<std::string> args = base;
        for (const auto& extra : {std::vector<std::string>{"--trace", path(tag + ".csv")},
                                  std::vector<std::string>{"--meta", path(tag + ".json")},
                                  std::vector<std::string>{"--out-rho1", path(tag + "_rho1.json")}}) {
            args.insert(args.end(), extra.begin(), extra.end());
        }
        return hsd_cli(args);
    };
    ASSERT_EQ(with("a").code, 0);
    ASSERT_EQ(with("b").code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a_rho1.json")), slurp(path("b_rho1.json")));
    auto meta_a = nlohmann::json::parse(slurp(path("a.json")));
    auto meta_b = nlohmann::json::parse(slurp(path("b.json")));
    meta_a.erase("wall_seconds");
    meta_b.erase("wall_seconds");
    EXPECT_EQ(meta_a.dump(), meta_b.dump());
}

TEST_F(CliTest, run_with_symmetry_and_threads) {
    const Invocation sym = hsd_cli({"run", "--state", "ghz:3", "--sym", "perm:1,2,0", "--sym", "perm:1,0,2",
                                    "--halt-cs", "50", "--seed", "2"});
    ASSERT_EQ(sym.code, 0) << sym.err;
    const auto meta = nlohmann::json::parse(sym.out);
    EXPECT_EQ(meta.at("symmetry_order"), 6);
    EXPECT_GE(meta.at("final_d2").get<double>(), ghz_distance_sq(3) - 1e-9);

    const Invocation threaded =
        hsd_cli({"run", "--state", "bell", "--halt-cs", "200", "--seed", "2", "--threads", "2"});
    ASSERT_EQ(threaded.code, 0) << threaded.err;
    EXPECT_EQ(nlohmann::json::parse(threaded.out).at("threads"), 2);
}

TEST_F(CliTest, run_with_local_unitary_symmetry) {
    write_state_file(path("x.json"), make_operator_file(pauli_x(), {2}));
    const Invocation inv = hsd_cli({"run", "--state", "bell", "--sym", "local:" + path("x.json") + "," +
                                    path("x.json"), "--halt-cs", "20", "--seed", "2"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_EQ(nlohmann::json::parse(inv.out).at("symmetry_order"), 2);
}

TEST_F(CliTest, run_default_halt_is_stall) {
    const Invocation inv = hsd_cli({"run", "--state", "ghz_css:3", "--init", "ghz_css:3", "--seed", "1"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto meta = nlohmann::json::parse(inv.out);
    EXPECT_EQ(meta.at("halt").at("stall_trials"), 1000000);
    EXPECT_EQ(meta.at("c_s"), 0);
}

TEST_F(CliTest, run_error_codes) {
    EXPECT_EQ(hsd_cli({"run", "--state", "nope", "--halt-cs", "1"}).code, 2);
    EXPECT_EQ(hsd_cli({"run", "--halt-cs", "1"}).code, 2);
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--halt-cs", "x"}).code, 2);
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--sym", "rot:1", "--halt-cs", "1"}).code, 2);
    EXPECT_EQ(hsd_cli({"run", "--state", path("missing.json"), "--halt-cs", "1"}).code, 3);
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--dims", "2,3", "--halt-cs", "1"}).code, 4);
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--init", "ghz:3", "--halt-cs", "1"}).code, 4);
    // Z (x) Z stabilizes the Bell state; the party swap does not stabilize the Tiles state.
    write_state_file(path("z.json"), make_operator_file(pauli_z(), {2}));
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--sym", "local:" + path("z.json") + "," +
                       path("z.json"), "--halt-cs", "1"})
                  .code,
              0);
    EXPECT_EQ(hsd_cli({"run", "--state", "upb_tiles", "--sym", "perm:1,0", "--halt-cs", "1"}).code, 4);
    EXPECT_EQ(hsd_cli({"run", "--state", "bell", "--threads", "0", "--halt-cs", "1"}).code, 2);
    EXPECT_EQ(hsd_cli({}).code, 2);
    EXPECT_EQ(hsd_cli({"--help"}).code, 0);
}

TEST_F(CliTest, fit_synthetic_traces) {
    write_trace_csv(fs::path(path("a.csv")), synthetic_trace(0.002, 8.0, 2000));
    const Invocation inv = hsd_cli({"fit", "--trace", path("a.csv"), "--stride", "1", "--out", path("fit.json")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto report = nlohmann::json::parse(slurp(path("fit.json")));
    EXPECT_EQ(report.dump() + "\n", inv.out);
    EXPECT_NEAR(report.at("a").get<double>(), 0.002, 0.0002);
    for (const char* key : {"a", "b", "r", "stride", "f", "r2"}) EXPECT_TRUE(report.contains(key)) << key;

    write_trace_csv(fs::path(path("zero.csv")), synthetic_trace(0.0, 8.0, 2000));
    const Invocation zero = hsd_cli({"fit", "--trace", path("zero.csv"), "--stride", "1"});
    ASSERT_EQ(zero.code, 0) << zero.err;
    EXPECT_LE(nlohmann::json::parse(zero.out).at("a").get<double>(), 1e-4);

    // Byte-stable report.
    EXPECT_EQ(hsd_cli({"fit", "--trace", path("a.csv"), "--stride", "1"}).out, inv.out);
}

TEST_F(CliTest, fit_error_codes) {
    write_text_file(path("two.csv"), "c_t,c_s\n1,1\n");
    EXPECT_EQ(hsd_cli({"fit", "--trace", path("two.csv")}).code, 3);
    EXPECT_EQ(hsd_cli({"fit", "--trace", path("absent.csv")}).code, 3);
    write_trace_csv(fs::path(path("short.csv")), synthetic_trace(0.0, 8.0, 5));
    EXPECT_EQ(hsd_cli({"fit", "--trace", path("short.csv"), "--stride", "1"}).code, 4);
    EXPECT_EQ(hsd_cli({"fit"}).code, 2);
}

TEST_F(CliTest, witness_bell_against_css_file) {
    ASSERT_EQ(hsd_cli({"state", "max_entangled_css:2", "--out", path("css.json")}).code, 0);
    const Invocation inv = hsd_cli({"witness", "--rho0", "bell", "--rho1", path("css.json"), "--seed", "1",
                                    "--operator", path("w.json")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto report = nlohmann::json::parse(inv.out);
    EXPECT_NEAR(report.at("lambda").get<double>(), 1.0 / 6.0, 1e-6);
    EXPECT_NEAR(report.at("value_rho0").get<double>(), 0.5, 1e-12);
    EXPECT_EQ(report.at("entangled"), true);
    const StateFile w = read_state_file(path("w.json"));
    EXPECT_EQ(w.kind, MatrixKind::operator_);
    EXPECT_EQ(w.dims, (Dims{2, 2}));
    EXPECT_NEAR(w.matrix.trace().real(), -4.0 * report.at("lambda").get<double>(), 1e-9);
    EXPECT_EQ(hsd_cli({"witness", "--rho0", "bell", "--rho1", path("css.json"), "--seed", "1"}).out,
              inv.out);
}

TEST_F(CliTest, witness_identical_and_mismatched) {
    const Invocation same = hsd_cli({"witness", "--rho0", "bell", "--rho1", "bell", "--restarts", "4"});
    ASSERT_EQ(same.code, 0) << same.err;
    EXPECT_EQ(nlohmann::json::parse(same.out).at("entangled"), false);
    EXPECT_EQ(hsd_cli({"witness", "--rho0", "bell", "--rho1", "ghz_css:3"}).code, 4);
    ASSERT_EQ(hsd_cli({"witness", "--rho0", "bell", "--rho1", "bell", "--operator", path("w.json")}).code, 0);
    EXPECT_EQ(hsd_cli({"run", "--state", path("w.json"), "--halt-cs", "1"}).code, 4);
}

TEST_F(CliTest, state_command) {
    const Invocation css2 = hsd_cli({"state", "max_entangled_css:2"});
    ASSERT_EQ(css2.code, 0);
    EXPECT_EQ(to_density(parse_state_file(nlohmann::json::parse(css2.out))).matrix(), werner_css_matrix());
    EXPECT_NE(css2.out.find("0.3333333333333333"), std::string::npos);
    EXPECT_NE(css2.out.find("0.16666666666666666"), std::string::npos);

    ASSERT_EQ(hsd_cli({"state", "ghz:3", "--out", path("ghz.json")}).code, 0);
    const StateFile ghz3 = read_state_file(path("ghz.json"));
    EXPECT_EQ(ghz3.matrix.rows(), 8);
    EXPECT_EQ(ghz3.matrix.cwiseAbs().sum(), 2.0);
    EXPECT_EQ(ghz3.matrix(0, 7), Complex(0.5));
    EXPECT_EQ(ghz3.matrix(7, 0), Complex(0.5));
    // Roundtrip through the file is byte-identical.
    EXPECT_EQ(dump_state_file(ghz3), slurp(path("ghz.json")));

    const Invocation upb = hsd_cli({"state", "upb_tiles"});
    ASSERT_EQ(upb.code, 0);
    const DensityMatrix rho = to_density(parse_state_file(nlohmann::json::parse(upb.out)));
    int rank = 0;
    const RealVector w = eigenvalues_hermitian(rho.matrix());
    for (int i = 0; i < w.size(); ++i) rank += w(i) > 1e-12;
    EXPECT_EQ(rank, 4);

    EXPECT_EQ(hsd_cli({"state", "nope"}).code, 2);
    EXPECT_EQ(hsd_cli({"state", "ghz:1"}).code, 2);
    EXPECT_EQ(hsd_cli({"state", "ghz:3", "--out", path("no/such/dir/x.json")}).code, 3);
}
