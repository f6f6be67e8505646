// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. All datasets are generated under a temporary
// directory through the command-line front end.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pgt/cli.hpp"
#include "pgt/error.hpp"
#include "pgt/pipeline.hpp"
#include "pgt/templates.hpp"
#include "pgt/verify.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kBalanceTolerance = 0.03;

int g_failed = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pgtgen");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = pgt::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void must(const CliResult& r, const std::string& what) {
    if (r.code != 0) throw std::runtime_error(what + " exited " + std::to_string(r.code) + ": " + r.err);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Largest absolute deviation of the observed shares from a uniform split over `categories`.
double max_uniform_deviation(const std::map<std::string, int>& counts, const std::vector<std::string>& categories) {
    int total = 0;
    for (const auto& c : categories) {
        const auto it = counts.find(c);
        total += it == counts.end() ? 0 : it->second;
    }
    if (total == 0) return 1.0;
    double worst = 0;
    for (const auto& c : categories) {
        const auto it = counts.find(c);
        const double share = (it == counts.end() ? 0 : it->second) / static_cast<double>(total);
        worst = std::max(worst, std::abs(share - 1.0 / categories.size()));
    }
    // unexpected categories count as full deviation
    for (const auto& [k, n] : counts)
        if (std::find(categories.begin(), categories.end(), k) == categories.end() && n > 0) worst = 1.0;
    return worst;
}

std::string shares(const std::map<std::string, int>& counts) {
    int total = 0;
    for (const auto& [k, n] : counts) total += n;
    std::string s;
    for (const auto& [k, n] : counts) {
        if (!s.empty()) s += " ";
        s += k + "=" + fmt("%.3f", n / static_cast<double>(std::max(total, 1)));
    }
    return s;
}

std::string gpt_answer(const json& sample, int turn) {
    return sample.at("conversations").at(turn + 1).at("value").get<std::string>();
}

// ---------------------------------------------------------------------------

std::string verify_summary(const json& r) {
    return fmt("%g samples, %g turns, %g mismatches", r["samples_checked"].get<double>(),
               r["turns_checked"].get<double>(), static_cast<double>(r["mismatches"].size())) +
           fmt(", %g ambiguity, %g alpha", static_cast<double>(r["ambiguity_violations"].size()),
               static_cast<double>(r["alpha_violations"].size())) +
           fmt(", %g pixel, %g record violations", static_cast<double>(r["pixel_violations"].size()),
               static_cast<double>(r["record_violations"].size()));
}

void oracle_agreement(const fs::path& root) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto src_dir = root / "source10k";
    // Vision-backbone scale inputs, square and not, PNG and JPEG.
    const std::vector<std::pair<int, int>> sizes = {{336, 336}, {448, 336}, {336, 252}, {252, 336}};
    const auto src = pgt::test::make_source_dataset(src_dir, {.rows = 10000, .distinct_images = 16, .sizes = sizes});
    const auto small_src =
        pgt::test::make_source_dataset(root / "source1k", {.rows = 1000, .distinct_images = 16, .sizes = sizes});

    struct Case {
        std::string name;
        std::vector<std::string> generate;
        fs::path source_root;
    };
    const std::vector<Case> cases = {
        {"gray", {"generate", "-n", "10000", "-o", (root / "ag").string()}, {}},
        {"overlay k=1", {"augment", "-i", src.string(), "-p", "1.0", "-k", "1", "-o", (root / "ao1").string()}, src_dir},
        {"overlay k=3", {"augment", "-i", src.string(), "-p", "1.0", "-k", "3", "-o", (root / "ao3").string()}, src_dir},
        {"separate", {"separate", "-i", small_src.string(), "-n", "10000", "-o", (root / "as").string()}, root / "source1k"},
    };
    bool all = true;
    std::string detail;
    for (const auto& c : cases) {
        auto args = c.generate;
        args.insert(args.end(), {"--seed", "1", "-q"});
        must(cli(args), c.name);
        std::vector<std::string> vargs = {"verify", args[std::find(args.begin(), args.end(), "-o") - args.begin() + 1]};
        if (!c.source_root.empty()) vargs.insert(vargs.end(), {"--source-root", c.source_root.string()});
        const auto r = cli(vargs);
        const auto j = json::parse(r.out);
        const bool clean = r.code == 0 && j["mismatches"].empty() && j["ambiguity_violations"].empty() &&
                           j["alpha_violations"].empty() && j["pixel_violations"].empty() &&
                           j["record_violations"].empty() && j["samples_checked"].get<int>() >= 10000;
        all = all && clean;
        detail += (detail.empty() ? "" : "; ") + c.name + " [" + verify_summary(j) + "]";
        fs::remove_all(args[std::find(args.begin(), args.end(), "-o") - args.begin() + 1]);
    }
    detail += fmt("; %.0f s wall", seconds_since(t0));
    report(all, "oracle-agreement", detail);
}

void determinism(const fs::path& root) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::map<std::string, std::string>> digests;
    for (const auto& [name, workers] : std::vector<std::pair<std::string, std::string>>{
             {"w1a", "1"}, {"w1b", "1"}, {"w8a", "8"}, {"w8b", "8"}}) {
        must(cli({"generate", "--count", "5000", "--seed", "42", "-j", workers, "-o", (root / name).string(), "-q"}),
             "generate " + name);
        auto d = pgt::test::tree_digest(root / name);
        // run-specific records: wall time and the worker count
        d.erase("report.json");
        d.erase("config.json");
        digests.push_back(std::move(d));
        fs::remove_all(root / name);
    }
    bool same = true;
    for (const auto& d : digests) same = same && d == digests[0];
    std::size_t pngs = 0;
    for (const auto& [path, h] : digests[0]) pngs += path.ends_with(".png");
    report(same && pngs == 5000 && digests[0].count("manifest.json") && digests[0].count("sidecar.jsonl"),
           "determinism",
           fmt("%g files hashed per run (%g PNGs), 4 runs (workers 1,1,8,8) ", digests[0].size(), pngs) +
               (same ? "identical" : "DIFFER") + fmt("; %.0f s wall", seconds_since(t0)));
}

void task_uniformity(const fs::path& root) {
    const auto out = root / "uniform";
    must(cli({"generate", "-n", "30000", "--seed", "7", "--no-images", "-o", out.string(), "-q"}), "generate 30k");
    const auto sidecar = pgt::test::load_sidecar(out);
    std::map<std::string, int> families, spatial_sub;
    std::map<std::string, std::map<std::string, int>> templates_by_subtask;
    for (const auto& r : sidecar)
        for (const auto& t : r["tasks"]) {
            ++families[t["family"].get<std::string>()];
            if (t["family"] == "spatial_relation") ++spatial_sub[t["subtask"].get<std::string>()];
            ++templates_by_subtask[t["subtask"].get<std::string>()][t["template_id"].get<std::string>()];
        }
    const int n = static_cast<int>(sidecar.size());
    bool fam_ok = families.size() == 3;
    for (const auto& [f, c] : families) {
        const double share = c / static_cast<double>(n);
        fam_ok = fam_ok && share >= 0.313 && share <= 0.353;
    }
    report(fam_ok, "uniformity.families", fmt("%g samples; ", n) + shares(families) + " (bounds [0.313, 0.353])");

    const double sub_dev = max_uniform_deviation(spatial_sub, {"relative_positioning", "coordinate_regression"});
    report(sub_dev <= kBalanceTolerance, "uniformity.spatial-subtasks",
           shares(spatial_sub) + fmt(" (max deviation %.4f, tolerance 0.03)", sub_dev));

    const auto registry = pgt::TemplateRegistry::builtin();
    bool tmpl_ok = true;
    std::string detail;
    for (auto s : pgt::kAllSubtasks) {
        const std::string sub(pgt::to_string(s));
        std::vector<std::string> expected;
        for (const auto* t : registry.eligible(s)) expected.push_back(t->id);
        const double dev = max_uniform_deviation(templates_by_subtask[sub], expected);
        tmpl_ok = tmpl_ok && dev <= kBalanceTolerance;
        detail += (detail.empty() ? "" : "; ") + sub + " {" + shares(templates_by_subtask[sub]) + "}";
    }
    report(tmpl_ok, "uniformity.templates", detail + " (per sub-task, tolerance 0.03)");
    fs::remove_all(out);
}

void conservation(const fs::path& root) {
    const auto src = pgt::test::make_source_dataset(root / "cons", {.rows = 1000, .distinct_images = 8});
    bool ok = true;
    std::string detail;
    for (const double p : {1.0, 0.5, 0.1, 0.05}) {
        const auto out = root / ("cons_out_" + std::to_string(static_cast<int>(p * 100)));
        const auto r = cli({"augment", "-i", src.string(), "-p", fmt("%g", p), "--no-images", "-o", out.string(), "-q"});
        must(r, "augment");
        const auto manifest = pgt::test::load_manifest(out);
        const auto sidecar = pgt::test::load_sidecar(out);
        const auto expected = static_cast<std::size_t>(std::floor(p * 1000 + 1e-9));
        const bool row_ok = manifest.size() == 1000 && sidecar.size() == expected;
        ok = ok && row_ok;
        if (!detail.empty()) detail += "; ";
        detail += fmt("p=%g: %g out, %g augmented", p, manifest.size(), sidecar.size()) +
                  fmt(" (want %g)", expected);
        fs::remove_all(out);
    }
    report(ok, "conservation", "1000 input rows; " + detail);
}

struct BalanceData {
    json manifest;
    std::vector<json> sidecar;
};

BalanceData balance_dataset(const fs::path& root) {
    const auto out = root / "balance";
    must(cli({"generate", "-n", "10000", "-k", "3", "--seed", "11", "--no-images", "-o", out.string(), "-q"}),
         "generate balance set");
    BalanceData d{pgt::test::load_manifest(out), pgt::test::load_sidecar(out)};
    fs::remove_all(out);
    return d;
}

void pixel_oracle(const BalanceData& d) {
    std::size_t instances = 0, agree = 0;
    for (std::size_t i = 0; i < d.sidecar.size(); ++i) {
        const auto& rec = d.sidecar[i];
        const int w = rec["canvas"]["width"], h = rec["canvas"]["height"];
        for (const auto& t : rec["tasks"]) {
            if (t["family"] != "counting") continue;
            ++instances;
            const auto spec = pgt::overlay_from_json(t["overlay"]);
            const auto counts = pgt::pixel_count_oracle(spec, w, h);
            const auto target = *pgt::color_from_string(t["slots"]["color"].get<std::string>());
            std::string emitted = gpt_answer(d.manifest[i], t["turn"].get<int>());
            if (!t["options"].empty()) {
                if (emitted.size() != 1 || emitted[0] < 'A' || emitted[0] - 'A' >= static_cast<int>(t["options"].size()))
                    continue;
                emitted = t["options"][emitted[0] - 'A'].get<std::string>();
            }
            agree += std::to_string(counts.at(target)) == emitted;
        }
    }
    report(instances >= 10000 && agree == instances, "pixel-count-oracle",
           fmt("%g counting instances, %g agree (%.2f%%)", instances, agree, 100.0 * agree / std::max<std::size_t>(1, instances)));
}

void answer_balance(const BalanceData& d) {
    std::map<std::string, int> relations, tf, spatial_c_pos, counts, counting_b_pos, closest_label, closest_pos,
        analogy_label;
    std::size_t spatial = 0, counting = 0, distance = 0;
    for (std::size_t i = 0; i < d.sidecar.size(); ++i)
        for (const auto& t : d.sidecar[i]["tasks"]) {
            const auto answer = gpt_answer(d.manifest[i], t["turn"].get<int>());
            const auto& options = t["options"];
            const auto position = [&](const std::string& correct) {
                for (std::size_t k = 0; k < options.size(); ++k)
                    if (options[k] == correct) return std::string(1, static_cast<char>('A' + k));
                return std::string("?");
            };
            const std::string sub = t["subtask"];
            if (t["family"] == "spatial_relation") ++spatial;
            if (t["family"] == "counting") ++counting;
            if (t["family"] == "distance_analogy") ++distance;
            if (sub == "relative_positioning") {
                ++relations[t["truth"]["relation"].get<std::string>()];
                if (t["answer_rule"] == "true_false") ++tf[answer];
                if (!options.empty()) ++spatial_c_pos[position(answer)];
            } else if (sub == "count_color") {
                ++counts[std::to_string(t["truth"]["count"].get<int>())];
                if (!options.empty()) ++counting_b_pos[answer];
            } else if (sub == "closest_point") {
                // the emitted answer is the option letter; the circle it names is in truth
                ++closest_label[t["truth"]["answer_label"].get<std::string>()];
                ++closest_pos[answer];
            } else if (sub == "color_analogy") {
                ++analogy_label[answer];
            }
        }

    const auto line = [](const std::string& name, const std::map<std::string, int>& m,
                         const std::vector<std::string>& cats) {
        const double dev = max_uniform_deviation(m, cats);
        report(dev <= kBalanceTolerance, name, shares(m) + fmt(" (max deviation %.4f, tolerance 0.03)", dev));
    };
    std::printf("# answer balance over %zu samples: %zu spatial, %zu counting, %zu distance tasks\n",
                d.sidecar.size(), spatial, counting, distance);
    line("balance.spatial-relations", relations, {"above", "below", "left", "right"});
    line("balance.spatial-true-false", tf, {"False", "True"});
    line("balance.spatial-mc-position", spatial_c_pos, {"A", "B"});
    line("balance.counting-values", counts, {"1", "2", "3", "4", "5", "6"});
    line("balance.counting-mc-position", counting_b_pos, {"A", "B", "C"});
    line("balance.closest-mc-position", closest_pos, {"A", "B", "C"});
    line("balance.closest-labels", closest_label, {"A", "B", "C"});  // D is always the target
    line("balance.analogy-labels", analogy_label, {"A", "B", "C", "D"});
}

void golden_templates() {
    const auto registry = pgt::TemplateRegistry::builtin();
    const auto patterns = registry.patterns();
    int checked = 0, matched = 0;
    std::string bad;
    for (const auto& entry : fs::directory_iterator(fs::path(PGT_GOLDEN_DIR) / "templates")) {
        const auto id = entry.path().stem().string();
        ++checked;
        const auto it = patterns.find(id);
        if (it != patterns.end() && it->second == pgt::test::read_file(entry.path()))
            ++matched;
        else
            bad += " " + id;
    }
    const bool typo = patterns.count("distance.closest") &&
                      patterns.at("distance.closest").find("Which one is closes to") != std::string::npos;
    report(checked == 7 && matched == checked && typo, "golden-templates",
           fmt("%g golden files, %g byte-identical", checked, matched) +
               (typo ? ", \"closes to\" kept" : ", \"closes to\" MISSING") + (bad.empty() ? "" : "; differ:" + bad));
}

/// Every leaf of `j` (with its JSON pointer), skipping fields a corruption cannot be detected on.
void leaves(const json& j, const std::string& ptr, std::vector<std::string>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            // Tolerances are thresholds the generator chose; per-sample seeds are provenance only.
            if (k == "tolerances" || k == "seed" || k == "schema") continue;
            leaves(v, ptr + "/" + k, out);
        }
    } else if (j.is_array() && !j.empty()) {
        for (std::size_t i = 0; i < j.size(); ++i) leaves(j[i], ptr + "/" + std::to_string(i), out);
    } else {
        out.push_back(ptr);
    }
}

json corrupt_value(const json& v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.02, 0.08);
    if (v.is_boolean()) return !v.get<bool>();
    if (v.is_number_integer()) return v.get<std::int64_t>() + 1 + static_cast<std::int64_t>(rng() % 3);
    if (v.is_number_float()) {
        const double x = v.get<double>();
        const double d = u(rng);
        return x + (x > 0.5 ? -d : d);
    }
    if (v.is_string()) {
        static const std::vector<std::string> pool = {"red", "green", "blue", "orange", "left", "above", "True",
                                                      "False", "A", "B", "C", "D", "3", "7", "(0.50, 0.50)"};
        for (;;) {
            const auto& s = pool[rng() % pool.size()];
            if (s != v.get<std::string>()) return s;
        }
    }
    return "corrupted";
}

void fault_injection(const fs::path& root) {
    const auto out = root / "faults";
    must(cli({"generate", "-n", "150", "-k", "3", "--seed", "3", "-o", out.string(), "-q"}), "generate fault set");
    const auto manifest = pgt::test::load_manifest(out);
    const auto sidecar = pgt::test::load_sidecar(out);
    pgt::VerifyOptions opts;
    opts.known_patterns = pgt::TemplateRegistry::builtin().patterns();
    opts.dataset_dir = out;
    opts.workers = 1;
    const auto baseline = pgt::verify_dataset(manifest, sidecar, opts);
    if (!baseline.ok()) {
        report(false, "fault-injection", "baseline dataset does not verify clean");
        return;
    }
    std::mt19937_64 rng(20261014);
    int detected = 0, trials = 0, answer_trials = 0;
    std::string missed;
    for (trials = 0; trials < 100; ++trials) {
        const std::size_t i = rng() % manifest.size();
        json m1 = json::array({manifest[i]});
        std::vector<json> s1 = {sidecar[i]};
        std::string where;
        if (rng() % 3 == 0) {
            // emitted answer in the manifest
            const auto& tasks = sidecar[i]["tasks"];
            const int turn = tasks[rng() % tasks.size()]["turn"];
            auto& v = m1[0]["conversations"][turn + 1]["value"];
            v = corrupt_value(v, rng);
            where = "manifest turn " + std::to_string(turn + 1);
            ++answer_trials;
        } else {
            std::vector<std::string> ptrs;
            leaves(sidecar[i], "", ptrs);
            where = ptrs[rng() % ptrs.size()];
            auto& v = s1[0][json::json_pointer(where)];
            v = corrupt_value(v, rng);
        }
        const auto r = pgt::verify_dataset(m1, s1, opts);
        const bool hit = !r.mismatches.empty() || !r.ambiguity_violations.empty() || !r.alpha_violations.empty() ||
                         !r.pixel_violations.empty() || !r.record_violations.empty();
        detected += hit;
        if (!hit) missed += " " + sidecar[i]["id"].get<std::string>() + ":" + where;
    }
    report(detected == trials, "fault-injection",
           fmt("%g single-field corruptions (%g of emitted answers), %g detected", trials, answer_trials, detected) +
               (missed.empty() ? "" : "; missed:" + missed));
    fs::remove_all(out);
}

void tasks_per_image_knob(const fs::path& root) {
    bool ok = true;
    std::string detail;
    for (const int k : {1, 2, 3}) {
        const auto out = root / ("knob" + std::to_string(k));
        must(cli({"generate", "-n", "1000", "-k", std::to_string(k), "--no-images", "-o", out.string(), "-q"}),
             "generate k");
        int exact = 0;
        const auto sidecar = pgt::test::load_sidecar(out);
        for (const auto& r : sidecar) {
            std::set<std::string> fam;
            for (const auto& t : r["tasks"]) fam.insert(t["family"].get<std::string>());
            exact += static_cast<int>(fam.size()) == k && static_cast<int>(r["tasks"].size()) == k;
        }
        ok = ok && exact == static_cast<int>(sidecar.size()) && sidecar.size() == 1000;
        detail += fmt("k=%g: %g/%g exact; ", k, exact, sidecar.size());
        fs::remove_all(out);
    }
    const auto rejected = cli({"generate", "-n", "10", "-k", "4", "-o", (root / "knob4").string(), "-q"});
    bool threw = false;
    pgt::PipelineConfig cfg;
    cfg.mode = pgt::Mode::GrayStandalone;
    cfg.output = root / "knob4";
    cfg.tasks_per_image = 4;
    try {
        cfg.validate();
    } catch (const pgt::ConfigError&) {
        threw = true;
    }
    ok = ok && rejected.code == pgt::kExitUsage && threw && !fs::exists(root / "knob4" / "manifest.json");
    detail += std::string("k=4: exit ") + std::to_string(rejected.code) + (threw ? ", ConfigError" : ", accepted");
    report(ok, "tasks-per-image", detail);
}

void run(const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(false, name, std::string("aborted: ") + e.what());
    }
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    pgt::test::TempDir root("acceptance");
    run("oracle-agreement", [&] { oracle_agreement(root.path()); });
    run("determinism", [&] { determinism(root.path()); });
    run("uniformity", [&] { task_uniformity(root.path()); });
    run("conservation", [&] { conservation(root.path()); });
    BalanceData balance;
    run("balance-dataset", [&] { balance = balance_dataset(root.path()); });
    run("pixel-count-oracle", [&] { pixel_oracle(balance); });
    run("answer-balance", [&] { answer_balance(balance); });
    run("golden-templates", [&] { golden_templates(); });
    run("fault-injection", [&] { fault_injection(root.path()); });
    run("tasks-per-image", [&] { tasks_per_image_knob(root.path()); });
    std::printf("# %d failed, total %.0f s\n", g_failed, seconds_since(t0));
    return g_failed == 0 ? 0 : 1;
}
