#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string cli_binary() {
    const char* bin = std::getenv("LHNFC_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

std::string bundled_data() {
    const char* data = std::getenv("LHNFC_DATA");
    REQUIRE(data != nullptr);
    return data;
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
    const fs::path out_file = scratch / "stdout.txt";
    const fs::path err_file = scratch / "stderr.txt";
    const std::string cmd = "\"" + cli_binary() + "\" " + args + " > \"" + out_file.string() +
                            "\" 2> \"" + err_file.string() + "\"";
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = testutil::read_file(out_file.string());
    res.err = testutil::read_file(err_file.string());
    return res;
}

}  // namespace

TEST_CASE("train writes the full artifact set") {
    const fs::path scratch = testutil::scratch_dir("cli-train");
    const fs::path out = scratch / "run";
    CliResult res = run_cli("train --data \"" + bundled_data() + "\" --out \"" + out.string() +
                                "\" --seed 3 --clusters 1 --scg-iters 80",
                            scratch);
    CAPTURE(res.err);
    CHECK(res.code == 0);
    CHECK(res.out.find("split: 258 train / 172 test") != std::string::npos);
    CHECK(res.out.find("training accuracy:") != std::string::npos);
    CHECK(res.out.find("test accuracy:") != std::string::npos);
    CHECK(res.out.find("artifacts:") != std::string::npos);
    for (const char* name : {"model.txt", "history.csv", "metrics.txt", "metrics.csv", "rules.txt"}) {
        CHECK(fs::exists(out / name));
    }
    std::string model = testutil::read_file((out / "model.txt").string());
    CHECK(model.rfind("lhnfc-model-v1\n", 0) == 0);
    CHECK(model.find("\nrules 3\n") != std::string::npos);
    std::string history = testutil::read_file((out / "history.csv").string());
    CHECK(history.find("iteration,cost,rmse,grad_norm") != std::string::npos);
}

TEST_CASE("usage mistakes exit with code 2") {
    const fs::path scratch = testutil::scratch_dir("cli-usage");
    const std::string out_arg = " --out \"" + (scratch / "o").string() + "\"";

    CHECK(run_cli("train" + out_arg, scratch).code == 2);   // no --data
    CHECK(run_cli("train --data \"" + bundled_data() + "\"" + out_arg + " --clusters 0", scratch)
              .code == 2);
    CHECK(run_cli("train --data \"" + (scratch / "missing.csv").string() + "\"" + out_arg, scratch)
              .code == 2);
    CHECK(run_cli("train --data \"" + bundled_data() + "\"" + out_arg + " --no-such-flag", scratch)
              .code == 2);
    CHECK(run_cli("evaluate --data \"" + bundled_data() + "\"" + out_arg, scratch).code == 2);
    CHECK(run_cli("", scratch).code == 2);   // a subcommand is required

    CliResult bad = run_cli("train --data \"" + bundled_data() + "\"" + out_arg + " --tau 0.5",
                            scratch);
    CHECK(bad.code == 2);   // selection flags belong to select/cv

    testutil::write_file((scratch / "typo.cfg").string(), "clusterz=2\n");
    CliResult typo = run_cli("train --data \"" + bundled_data() + "\"" + out_arg + " --config \"" +
                                 (scratch / "typo.cfg").string() + "\"",
                             scratch);
    CHECK(typo.code == 2);
    CHECK(typo.err.find("unknown key") != std::string::npos);
}

TEST_CASE("grad-check passes at the initial point and honors its tolerance") {
    const fs::path scratch = testutil::scratch_dir("cli-gc");
    const fs::path out = scratch / "gc";
    CliResult res = run_cli("grad-check --data \"" + bundled_data() + "\" --out \"" +
                                out.string() + "\" --seed 2",
                            scratch);
    CAPTURE(res.err);
    CHECK(res.code == 0);
    CHECK(res.out.find("-> ok") != std::string::npos);
    CHECK(res.out.find("MISMATCH") == std::string::npos);
    CHECK(fs::exists(out / "gradcheck.txt"));

    // an absurd tolerance turns the same comparison into a failure
    CliResult strict = run_cli("grad-check --data \"" + bundled_data() + "\" --out \"" +
                                   (scratch / "gc2").string() + "\" --seed 2 --gc-tol 1e-30",
                               scratch);
    CHECK(strict.code == 1);
    CHECK(strict.err.find("gradient check failed") != std::string::npos);
}

TEST_CASE("select reports the surviving features on the bundled data") {
    const fs::path scratch = testutil::scratch_dir("cli-select");
    const fs::path out = scratch / "sel";
    CliResult res = run_cli("select --data \"" + bundled_data() + "\" --out \"" + out.string() +
                                "\" --seed 1 --clusters 1",
                            scratch);
    CAPTURE(res.err);
    CHECK(res.code == 0);
    CHECK(res.out.find("kept features: 1 2 3 5") != std::string::npos);
    CHECK(res.out.find("dropped features: 4") != std::string::npos);
    for (const char* name : {"selection.txt", "selection.csv", "phase1_history.csv", "model.txt"}) {
        CHECK(fs::exists(out / name));
    }
    std::string model = testutil::read_file((out / "model.txt").string());
    CHECK(model.find("mask 1 1 1 0 1") != std::string::npos);
}

TEST_CASE("export-rules prints a readable rule block") {
    const fs::path scratch = testutil::scratch_dir("cli-rules");
    const fs::path run = scratch / "run";
    CHECK(run_cli("train --data \"" + bundled_data() + "\" --out \"" + run.string() +
                      "\" --seed 5 --clusters 1 --scg-iters 30",
                  scratch)
              .code == 0);

    CliResult res = run_cli("export-rules --model \"" + (run / "model.txt").string() +
                                "\" --out \"" + (scratch / "exp").string() + "\"",
                            scratch);
    CHECK(res.code == 0);
    CHECK(res.out.find("R1: IF") != std::string::npos);
    CHECK(res.out.find("THEN class is") != std::string::npos);
    CHECK(fs::exists(scratch / "exp" / "rules.txt"));

    testutil::write_file((scratch / "garbage.txt").string(), "not a model\n");
    CliResult bad = run_cli("export-rules --model \"" + (scratch / "garbage.txt").string() +
                                "\" --out \"" + (scratch / "exp2").string() + "\"",
                            scratch);
    CHECK(bad.code == 2);
}

TEST_CASE("evaluate scores a saved model and can dump a surface") {
    const fs::path scratch = testutil::scratch_dir("cli-eval");
    const fs::path run = scratch / "run";
    CHECK(run_cli("train --data \"" + bundled_data() + "\" --out \"" + run.string() +
                      "\" --seed 7 --clusters 1 --scg-iters 60",
                  scratch)
              .code == 0);

    const fs::path out = scratch / "eval";
    CliResult res = run_cli("evaluate --model \"" + (run / "model.txt").string() + "\" --data \"" +
                                bundled_data() + "\" --out \"" + out.string() +
                                "\" --surface 1,2 --surface-steps 5",
                            scratch);
    CAPTURE(res.err);
    CHECK(res.code == 0);
    CHECK(res.out.find("accuracy:") != std::string::npos);
    CHECK(res.out.find("430 samples") != std::string::npos);
    CHECK(fs::exists(out / "metrics.txt"));
    std::string surface = testutil::read_file((out / "surface.csv").string());
    CHECK(surface.find("x,y,score_1,score_2,score_3,predicted") != std::string::npos);
    // 5x5 grid plus header and config echo
    CHECK(std::count(surface.begin(), surface.end(), '\n') >= 26);
}

TEST_CASE("an explicit flag beats the same key in a config file") {
    const fs::path scratch = testutil::scratch_dir("cli-config");
    const fs::path cfg_file = scratch / "run.cfg";
    testutil::write_file(cfg_file.string(), "clusters=2\nscg-iters=10\n");

    CliResult from_file = run_cli("train --data \"" + bundled_data() + "\" --out \"" +
                                      (scratch / "a").string() + "\" --config \"" +
                                      cfg_file.string() + "\"",
                                  scratch);
    CAPTURE(from_file.err);
    CHECK(from_file.code == 0);
    std::string a = testutil::read_file((scratch / "a" / "model.txt").string());
    CHECK(a.find("\nrules 6\n") != std::string::npos);

    CliResult overridden = run_cli("train --data \"" + bundled_data() + "\" --out \"" +
                                       (scratch / "b").string() + "\" --config \"" +
                                       cfg_file.string() + "\" --clusters 1",
                                   scratch);
    CHECK(overridden.code == 0);
    std::string b = testutil::read_file((scratch / "b" / "model.txt").string());
    CHECK(b.find("\nrules 3\n") != std::string::npos);
}

TEST_CASE("identical runs produce byte-identical artifacts") {
    // the out directory is part of the echoed configuration, so the rerun
    // goes into the same place and the bytes are captured in between
    const fs::path scratch = testutil::scratch_dir("cli-repro");
    const std::string cmd = "train --data \"" + bundled_data() +
                            "\" --seed 11 --clusters 1 --scg-iters 50 --out \"" +
                            (scratch / "x").string() + "\"";
    CHECK(run_cli(cmd, scratch).code == 0);
    const std::string model_a = testutil::read_file((scratch / "x" / "model.txt").string());
    const std::string metrics_a = testutil::read_file((scratch / "x" / "metrics.csv").string());
    CHECK(run_cli(cmd, scratch).code == 0);
    CHECK(testutil::read_file((scratch / "x" / "model.txt").string()) == model_a);
    CHECK(testutil::read_file((scratch / "x" / "metrics.csv").string()) == metrics_a);
}

TEST_CASE("cv summarizes folds over several seeds") {
    const fs::path scratch = testutil::scratch_dir("cli-cv");
    const fs::path out = scratch / "cv";
    CliResult res = run_cli("cv --data \"" + bundled_data() + "\" --out \"" + out.string() +
                                "\" --seed 1 --seeds 2 --folds 3 --clusters 1 --scg-iters 40",
                            scratch);
    CAPTURE(res.err);
    CHECK(res.code == 0);
    CHECK(res.out.find("validation accuracy:") != std::string::npos);
    CHECK(res.out.find("over 6 folds") != std::string::npos);
    CHECK(fs::exists(out / "cv_summary.txt"));
    std::string detail = testutil::read_file((out / "cv_detail.csv").string());
    CHECK(detail.find("seed,fold,split") != std::string::npos);
}
