#include "qread/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qread/bench.hpp"
#include "qread/burgers_tsr.hpp"
#include "qread/cfd.hpp"
#include "qread/readout_qae.hpp"
#include "qread/readout_sampling.hpp"
#include "qread/rng.hpp"

namespace qread {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

std::vector<std::vector<std::string>> read_series_csv(const std::string& path,
                                                      std::vector<std::string>* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    const auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    if (header) *header = split(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(split(line));
    return rows;
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + path);
    uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) h = (h ^ uint64_t(uint8_t(c))) * 1099511628211ULL;
    return h;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    json j;
    j["argv"] = manifest.argv;
    j["config"] = json::parse(manifest.config_json.empty() ? "{}" : manifest.config_json);
    j["seed"] = manifest.seed;
    j["outdir"] = manifest.outdir;
    json sums = json::object();
    for (const auto& [file, sum] : manifest.checksums) {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)sum);
        sums[file] = buf;
    }
    j["checksums"] = sums;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    json j;
    in >> j;
    RunManifest m;
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config_json = j.at("config").dump();
    m.seed = j.at("seed").get<uint64_t>();
    m.outdir = j.at("outdir").get<std::string>();
    for (const auto& [file, sum] : j.at("checksums").items())
        m.checksums[file] = std::stoull(sum.get<std::string>(), nullptr, 16);
    return m;
}

namespace {

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

std::vector<std::string> parse_names(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// list-valued options may arrive as strings or as single numbers
std::string list_value(const json& j, const std::string& key, const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return format_cell(v.get<double>());
    return dflt;
}

std::string default_outdir() {
    const char* env = std::getenv("QREAD_OUTDIR");
    return env && *env ? env : ".";
}

// artifact registry for the manifest
struct OutputSet {
    std::string outdir;
    std::vector<std::string> files;

    std::string path(const std::string& name) {
        fs::create_directories(outdir);
        files.push_back(name);
        return (fs::path(outdir) / name).string();
    }
    void finalize(const std::vector<std::string>& argv, const json& config, uint64_t seed) {
        RunManifest m;
        m.argv = argv;
        m.config_json = config.dump();
        m.seed = seed;
        m.outdir = outdir;
        for (const std::string& f : files)
            m.checksums[f] = fnv1a_file((fs::path(outdir) / f).string());
        write_manifest((fs::path(outdir) / "manifest.json").string(), m);
    }
};

// paper-order reference slopes for the summary CSV
double expected_slope(const std::string& example, const std::string& method) {
    if (method == "rsr") return -0.5;
    if (method == "arsr") return -1.0 / 3.0;
    if (method == "fsr") return example == "example1" ? -0.25 : -0.5;
    if (method == "fsqae") return -1.0 / 3.0;
    if (method == "fsqae2") return -1.0;
    return 0.0;
}

void append_run_rows(std::vector<std::vector<std::string>>& rows, const ScalingRun& run) {
    for (const auto& p : run.points)
        for (size_t r = 0; r < p.errors.size(); ++r)
            rows.push_back({run.method, abscissa_kind_name(run.kind), format_cell(p.abscissa),
                            std::to_string(p.seeds[r]), format_cell(p.errors[r])});
}

int cmd_bench(const std::string& example, const json& cfgj,
              const std::vector<std::string>& argv) {
    const std::string methods_csv = cfgj.value("methods", std::string("rsr,arsr,fsr"));
    const int repeats = cfgj.value("repeats", 5);
    const uint64_t seed = cfgj.value("seed", uint64_t(1));
    const int jobs = cfgj.value("jobs", 0);
    OutputSet out{cfgj.value("out", default_outdir()), {}};

    std::vector<std::vector<std::string>> series, summary;
    BenchOptions opt;
    opt.repeats = repeats;
    opt.seed = seed;
    opt.jobs = jobs;
    opt.fsr_p_hat = cfgj.value("fsr_p_hat", 2);
    opt.fsr_tau = cfgj.value("tau", 4.0);
    opt.qae_m_max = cfgj.value("qae_m_max", uint64_t(16));

    if (example == "postproc") {
        const uint64_t shots = uint64_t(cfgj.value("shots_single", 2.56e6));
        std::vector<int> sizes;
        for (double v : parse_list(list_value(cfgj, "sizes", "3,4,5,6,7,8,9")))
            sizes.push_back(int(v));
        const TestFunction fn = make_gaussian2d(3);  // evaluator reused per size
        const PostprocStudy st = run_postproc_study(
            [&](double x, double y) {
                return fn.eval({x, y});
            },
            sizes, shots, seed, jobs);
        for (size_t mi = 0; mi < st.methods.size(); ++mi) {
            for (size_t si = 0; si < st.grid_n.size(); ++si)
                series.push_back({st.methods[mi], "grid_n", format_cell(st.grid_n[si]),
                                  std::to_string(seed), format_cell(st.errors[mi][si])});
            summary.push_back({st.methods[mi], format_cell(st.slopes[mi]), "",
                               format_cell(st.methods[mi] == "rms" ? 0.0 : 0.5)});
        }
        write_series_csv(out.path("postproc_series.csv"),
                         {"method", "abscissa_kind", "abscissa", "seed", "l2ns_error"}, series);
        write_series_csv(out.path("postproc_summary.csv"),
                         {"method", "slope", "stderr", "expected_slope"}, summary);
        out.finalize(argv, cfgj, seed);
        return 0;
    }

    TestFunction fn;
    std::string tag = example;
    if (example == "example1") {
        fn = make_gaussian2d(cfgj.value("grid_n0", 9));
    } else if (example == "example2") {
        fn = make_sine2d(cfgj.value("grid_n0", 9));
    } else if (example == "cfd-scaling") {
        const VelocityField cav = make_cavity_analog(cfgj.value("grid_n0", 9));
        fn = test_function_from_grid("cavity_ux", cav.ux);
    } else {
        throw CLI::ValidationError("unknown bench example: " + example);
    }

    const std::vector<double> shots =
        parse_list(list_value(cfgj, "shots", "1e4,4e4,1.6e5,6.4e5,2.56e6,1.024e7,4.096e7"));
    const std::vector<double> eps0 =
        parse_list(list_value(cfgj, "eps0", "0.05,0.02,0.01,0.005,0.0025,0.001,0.0005"));

    for (const std::string& method : parse_names(methods_csv)) {
        const bool qae = method == "fsqae" || method == "fsqae2";
        TestFunction target = fn;
        if (qae) {
            const int qn0 = cfgj.value("qae_n0", 6);
            if (example == "example1") target = make_gaussian2d(qn0);
            if (example == "example2") target = make_sine2d(qn0);
        }
        const ScalingRun run = run_scaling_experiment(
            method, target, qae ? AbscissaKind::Queries : AbscissaKind::Shots,
            qae ? eps0 : shots, opt);
        append_run_rows(series, run);
        if (run.fitted)
            summary.push_back({method, format_cell(run.slope), format_cell(run.slope_stderr),
                               format_cell(expected_slope(tag, method))});
    }
    write_series_csv(out.path("series.csv"),
                     {"method", "abscissa_kind", "abscissa", "seed", "l2ns_error"}, series);
    if (!summary.empty())
        write_series_csv(out.path("summary.csv"),
                         {"method", "slope", "stderr", "expected_slope"}, summary);
    out.finalize(argv, cfgj, seed);
    return 0;
}

int cmd_readout(const json& cfgj, const std::vector<std::string>& argv) {
    const std::string input = cfgj.at("input").get<std::string>();
    const std::string method = cfgj.value("method", std::string("fsr"));
    const uint64_t seed = cfgj.value("seed", uint64_t(1));
    OutputSet out{cfgj.value("out", default_outdir()), {}};

    const RawGrid raw = read_grid_csv(input);
    const GridFunction g = raw.to_grid_function();
    const NormalizedState state = encode(g);

    ReadoutConfig rc;
    rc.shots = uint64_t(cfgj.value("shots", 1e6));
    rc.seed = seed;
    rc.analytic = cfgj.value("analytic", false);
    rc.shift = cfgj.value("shift", 0.0);
    rc.adaptive_p_hat = cfgj.value("fsr_p_hat", 2);
    rc.adaptive_tau = cfgj.value("tau", 4.0);
    if (cfgj.contains("block_m")) {
        std::vector<uint64_t> m;
        for (double v : parse_list(list_value(cfgj, "block_m", "")))
            m.push_back(uint64_t(v));
        rc.block_m = m;
    }

    Reconstruction rec;
    if (method == "rsr") {
        rec = rsr_readout(state, rc);
    } else if (method == "arsr") {
        rec = arsr_readout(state, rc);
    } else if (method == "fsr") {
        rec = fsr_readout(state, rc);
    } else if (method == "extfsr") {
        rec = extension_fsr_readout(state, rc);
    } else if (method == "rsqae" || method == "fsqae" || method == "fsqae2") {
        RqaeConfig qc;
        qc.eps0 = cfgj.value("eps0_single", 0.01);
        qc.gamma = cfgj.value("gamma", 0.05);
        qc.q = cfgj.value("q", 2.0);
        qc.channel = RqaeConfig::Channel::Analytic;
        std::vector<uint64_t> m(size_t(state.spec.dim()),
                                uint64_t(cfgj.value("qae_m", 8)));
        if (method == "rsqae") {
            std::vector<uint64_t> targets(state.spec.total());
            for (uint64_t j = 0; j < targets.size(); ++j) targets[j] = j;
            rec = rsqae_readout(state, targets, qc, seed);
        } else if (method == "fsqae") {
            rec = fsqae_readout(state, m, qc, seed);
        } else {
            rec = fsqae2_readout(state, m, qc, seed);
        }
    } else {
        throw CLI::ValidationError("unknown readout method: " + method);
    }

    write_grid_csv(out.path("reconstruction.csv"), rec.result);
    if (!rec.coeffs.empty())
        write_coefficient_csv(out.path("coefficients.csv"), rec.coeffs, state.spec.dim());
    std::vector<std::vector<std::string>> meta{
        {"method", rec.method},
        {"l2ns_error_vs_input", format_cell(l2ns_error(rec.result, g))},
        {"shots_used", std::to_string(rec.shots_used)},
        {"queries", std::to_string(rec.queries)}};
    write_series_csv(out.path("readout_info.csv"), {"key", "value"}, meta);
    out.finalize(argv, cfgj, seed);
    return 0;
}

int cmd_cfd_visualize(const json& cfgj, const std::vector<std::string>& argv) {
    const uint64_t seed = cfgj.value("seed", uint64_t(1));
    OutputSet out{cfgj.value("out", default_outdir()), {}};

    VelocityField field;
    const std::string synth = cfgj.value("synthetic", std::string(""));
    if (!synth.empty()) {
        const int n0 = cfgj.value("grid_n0", 9);
        if (synth == "jet")
            field = make_jet_analog(n0);
        else if (synth == "taylor-green")
            field = make_taylor_green(n0);
        else if (synth == "cavity")
            field = make_cavity_analog(n0);
        else
            throw CLI::ValidationError("unknown synthetic field: " + synth);
    } else {
        const std::string input = cfgj.value("input", std::string(""));
        if (input.empty())
            throw CLI::ValidationError("cfd visualize needs --input or --synthetic");
        const std::string format = cfgj.value("format", std::string("gridcsv"));
        const LoadedField lf = load_field(
            input, format == "raw" ? FieldFormat::RawMatrix : FieldFormat::GridCsv);
        if (lf.field) {
            field = *lf.field;
        } else {
            const uint64_t target = uint64_t(cfgj.value("upsample", 512));
            field = spline_upsample(lf.raw, target, target);
        }
    }

    const bool periodic = cfgj.value("periodic", synth == "taylor-green");
    write_pgm(out.path("truth_ux.pgm"), field.ux);
    write_pgm(out.path("truth_uy.pgm"), field.uy);
    write_pgm(out.path("truth_curl.pgm"), curl_9pt(field, periodic));
    write_pgm(out.path("truth_stream.pgm"), stream_function(field));

    double min_ux = field.ux.values[0], min_uy = field.uy.values[0];
    for (double v : field.ux.values) min_ux = std::min(min_ux, v);
    for (double v : field.uy.values) min_uy = std::min(min_uy, v);

    const uint64_t shots = uint64_t(cfgj.value("shots_single", 1.6e5));
    for (const std::string& method :
         parse_names(cfgj.value("methods", std::string("rsr,arsr,fsr")))) {
        VelocityField rec;
        rec.ux.spec = rec.uy.spec = field.spec();
        for (int comp = 0; comp < 2; ++comp) {
            const GridFunction& src = comp == 0 ? field.ux : field.uy;
            const double shift = comp == 0 ? -min_ux : -min_uy;
            ReadoutConfig rc;
            rc.shots = shots;
            rc.seed = derive_seed(seed, {uint64_t(comp), 0xcfdULL});
            Reconstruction r;
            if (method == "fsr") {
                r = fsr_readout(encode(src), rc);
            } else if (method == "extfsr") {
                r = extension_fsr_readout(encode(src), rc);
            } else {
                // real-space methods need the nonnegativity shift
                GridFunction shifted = src;
                for (double& v : shifted.values) v += shift;
                rc.shift = shift;
                rc.arsr_start_m = 4;  // coarse fields converge from m = 4 upward
                r = method == "rsr" ? rsr_readout(encode(shifted), rc)
                                    : arsr_readout(encode(shifted), rc);
            }
            (comp == 0 ? rec.ux : rec.uy) = r.result;
        }
        write_pgm(out.path(method + "_ux.pgm"), rec.ux);
        write_pgm(out.path(method + "_uy.pgm"), rec.uy);
        write_pgm(out.path(method + "_curl.pgm"), curl_9pt(rec, periodic));
        write_pgm(out.path(method + "_stream.pgm"), stream_function(rec));
        write_field_csv(out.path(method + "_field.csv"), rec);
        std::vector<std::vector<std::string>> err{
            {"ux", format_cell(l2ns_error(rec.ux, field.ux))},
            {"uy", format_cell(l2ns_error(rec.uy, field.uy))}};
        write_series_csv(out.path(method + "_errors.csv"), {"component", "l2ns_error"}, err);
    }
    out.finalize(argv, cfgj, seed);
    return 0;
}

int cmd_burgers(const json& cfgj, const std::vector<std::string>& argv) {
    BurgersConfig cfg;
    cfg.n0 = cfgj.value("grid_n0", 5);
    cfg.dt = cfgj.value("dt", 0.04);
    cfg.steps = cfgj.value("steps", 25);
    cfg.viscosity = cfgj.value("viscosity", 0.05);
    cfg.method = cfgj.value("method", std::string("fsr"));
    cfg.shots_per_circuit = uint64_t(cfgj.value("shots_single", 1e5));
    cfg.kappa = cfgj.value("kappa", 0.51);
    cfg.seed = cfgj.value("seed", uint64_t(1));
    cfg.analytic = cfgj.value("analytic", false);
    cfg.keep_fields = cfgj.value("dump_fields", false);
    OutputSet out{cfgj.value("out", default_outdir()), {}};

    const TsrTrace trace = tsr_run(cfg);
    write_trace_csv(out.path("trace.csv"), trace);
    write_field_csv(out.path("final_field.csv"), trace.final_field);
    write_pgm(out.path("final_ux.pgm"), trace.final_field.ux);
    if (cfg.keep_fields)
        for (size_t k = 0; k < trace.fields.size(); ++k)
            write_field_csv(out.path("field_step" + std::to_string(k + 1) + ".csv"),
                            trace.fields[k]);
    std::printf("final l2ns error vs reference: %.6f (total shots %.3g)\n",
                trace.final_error, trace.total_shots);
    out.finalize(argv, cfgj, cfg.seed);
    return 0;
}

int cmd_estimate_shots(const json& cfgj) {
    const std::string cls_name = cfgj.value("class", std::string("w21"));
    const int d = cfgj.value("dim", 2);
    const double eps = cfgj.value("eps", 0.01);
    const RegularityClass cls =
        cls_name == "w11" ? RegularityClass::W11 : RegularityClass::W21;
    const double rsr = round_sig(estimate_required_shots("rsr", d, eps, cls), 2);
    for (const std::string method : {"rsr", "arsr", "fsr"}) {
        const double shots = round_sig(estimate_required_shots(method, d, eps, cls), 2);
        std::printf("%-5s %.2g  x%.2g\n", method.c_str(), shots, round_sig(rsr / shots, 2));
    }
    return 0;
}

json collect_json(CLI::App* cmd, const std::string& config_path) {
    // flags win over the optional JSON config file
    json j = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw CLI::ValidationError("cannot open config: " + config_path);
        in >> j;
    }
    for (const CLI::Option* opt : cmd->get_options()) {
        std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
        if (name.empty() || name == "config") continue;
        for (char& c : name)
            if (c == '-') c = '_';
        if (opt->get_expected_min() == 0) {  // flag
            if (opt->count())
                j[name] = true;
            else if (!j.contains(name))
                j[name] = false;
            continue;
        }
        if (!opt->count() && j.contains(name)) continue;  // keep config value
        if (!opt->count() && opt->get_default_str().empty()) continue;
        const std::string val = opt->count() ? opt->results()[0] : opt->get_default_str();
        // numeric when it parses, string otherwise
        try {
            size_t pos = 0;
            const double num = std::stod(val, &pos);
            if (pos == val.size()) {
                if (num == uint64_t(num) && val.find('.') == std::string::npos &&
                    val.find('e') == std::string::npos)
                    j[name] = uint64_t(num);
                else
                    j[name] = num;
                continue;
            }
        } catch (...) {
        }
        if (val == "true" || val == "false")
            j[name] = (val == "true");
        else
            j[name] = val;
    }
    return j;
}

}  // namespace

int dispatch(const std::vector<std::string>& argv) {
    CLI::App app{"quantum-state readout toolkit"};
    app.require_subcommand(1);

    // shared per-command option tables; every option is also a config key
    struct CmdSpec {
        CLI::App* cmd = nullptr;
        std::string config;
        std::map<std::string, std::string> values;
    };

    const auto add_common = [&](CLI::App* cmd, CmdSpec& spec) {
        cmd->add_option("--config", spec.config, "JSON config file (flags win)");
        cmd->add_option("--out", "output directory")->default_str(default_outdir());
        cmd->add_option("--seed", "master seed")->default_str("1");
        cmd->add_option("--jobs", "worker cap (0 = hardware)")->default_str("0");
    };

    CmdSpec bench_spec;
    CLI::App* bench = app.add_subcommand("bench", "scaling experiments");
    bench->require_subcommand(1);
    std::map<std::string, CLI::App*> bench_subs;
    for (const std::string sub : {"example1", "example2", "postproc", "cfd-scaling"}) {
        CLI::App* c = bench->add_subcommand(sub);
        add_common(c, bench_spec);
        c->add_option("--methods", "comma-separated methods")
            ->default_str(sub == "postproc" ? "rms,mean,sharm,fmf" : "rsr,arsr,fsr");
        c->add_option("--shots", "comma-separated shot counts")
            ->default_str("1e4,4e4,1.6e5,6.4e5,2.56e6,1.024e7,4.096e7");
        c->add_option("--eps0", "comma-separated QAE targets")
            ->default_str("0.05,0.02,0.01,0.005,0.0025,0.001,0.0005");
        c->add_option("--repeats")->default_str("5");
        c->add_option("--grid-n0", "sampling grid qubits per axis")->default_str("9");
        c->add_option("--qae-n0", "QAE grid qubits per axis")->default_str("6");
        c->add_option("--qae-m-max")->default_str("16");
        c->add_option("--fsr-p-hat")->default_str("2");
        c->add_option("--tau")->default_str("4");
        c->add_option("--shots-single", "postproc shot count")->default_str("2.56e6");
        c->add_option("--sizes", "postproc grid exponents")->default_str("3,4,5,6,7,8,9");
        bench_subs[sub] = c;
    }

    CmdSpec readout_spec;
    CLI::App* readout = app.add_subcommand("readout", "reconstruct one grid file");
    add_common(readout, readout_spec);
    readout->add_option("--input", "grid CSV input")->required();
    readout->add_option("--method")->default_str("fsr");
    readout->add_option("--shots", "sampling budget")->default_str("1e6");
    readout->add_option("--eps0-single", "per-coefficient QAE target")->default_str("0.01");
    readout->add_option("--qae-m", "QAE block size per dimension")->default_str("8");
    readout->add_option("--gamma")->default_str("0.05");
    readout->add_option("--q")->default_str("2");
    readout->add_option("--shift")->default_str("0");
    readout->add_option("--block-m", "comma-separated M per dimension");
    readout->add_flag("--analytic", "shot-free probabilities");
    readout->add_option("--fsr-p-hat")->default_str("2");
    readout->add_option("--tau")->default_str("4");

    CmdSpec cfd_spec;
    CLI::App* cfd = app.add_subcommand("cfd", "CFD ingestion and visualization");
    CLI::App* visualize = cfd->add_subcommand("visualize");
    add_common(visualize, cfd_spec);
    visualize->add_option("--input", "field file");
    visualize->add_option("--format", "gridcsv | raw")->default_str("gridcsv");
    visualize->add_option("--synthetic", "jet | taylor-green | cavity");
    visualize->add_option("--methods")->default_str("rsr,arsr,fsr");
    visualize->add_option("--shots-single")->default_str("1.6e5");
    visualize->add_option("--grid-n0")->default_str("9");
    visualize->add_option("--upsample", "target size for raw inputs")->default_str("512");
    visualize->add_flag("--periodic", "periodic derivative stencils");

    CmdSpec burgers_spec;
    CLI::App* burgers = app.add_subcommand("burgers", "time-stepwise readout pipeline");
    CLI::App* brun = burgers->add_subcommand("run");
    add_common(brun, burgers_spec);
    brun->add_option("--grid-n0")->default_str("5");
    brun->add_option("--dt")->default_str("0.04");
    brun->add_option("--steps")->default_str("25");
    brun->add_option("--viscosity")->default_str("0.05");
    brun->add_option("--method", "fsr | rsr")->default_str("fsr");
    brun->add_option("--shots-single", "shots per circuit")->default_str("1e5");
    brun->add_option("--kappa")->default_str("0.51");
    brun->add_flag("--analytic", "shot-free readout");
    brun->add_flag("--dump-fields", "write every per-step field");

    CmdSpec est_spec;
    CLI::App* est = app.add_subcommand("estimate-shots", "resource estimates");
    est->add_option("--config", est_spec.config, "JSON config file");
    est->add_option("--class", "w11 | w21")->default_str("w21");
    est->add_option("--dim")->default_str("2");
    est->add_option("--eps")->default_str("0.01");

    CLI::App* rerun = app.add_subcommand("rerun", "re-execute a stored manifest");
    std::string manifest_path;
    rerun->add_option("manifest", manifest_path, "manifest.json path")->required();

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty()) args.pop_back();  // program name
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << app.help() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (rerun->parsed()) {
            const RunManifest m = read_manifest(manifest_path);
            return dispatch(m.argv);
        }
        if (bench->parsed()) {
            for (auto& [name, cmd] : bench_subs)
                if (cmd->parsed())
                    return cmd_bench(name, collect_json(cmd, bench_spec.config), argv);
        }
        if (readout->parsed())
            return cmd_readout(collect_json(readout, readout_spec.config), argv);
        if (cfd->parsed() && visualize->parsed())
            return cmd_cfd_visualize(collect_json(visualize, cfd_spec.config), argv);
        if (burgers->parsed() && brun->parsed())
            return cmd_burgers(collect_json(brun, burgers_spec.config), argv);
        if (est->parsed()) return cmd_estimate_shots(collect_json(est, est_spec.config));
        std::cerr << app.help() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return dispatch(args);
}

}  // namespace qread
