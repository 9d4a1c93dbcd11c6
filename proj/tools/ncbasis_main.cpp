// Batch command line for building Haar systems in weighted matrix algebras,
// expanding matrices, and certifying partial-sum projection norms.
//
// Exit codes: 0 all checks pass, 2 usage or domain error, 3 certification
// or verification failure, 4 numeric failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ncbasis/rng.hpp"
#include "ncbasis/serialize.hpp"
#include "ncbasis/tensorprod.hpp"

using namespace ncbasis;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCertFailure = 3;
constexpr int kExitNumeric = 4;

struct RunConfig {
    std::string command = "certify";
    std::string suite = "haar";
    std::string alpha = "0.5";
    int level = 2;
    std::string side = "left";
    std::string p = "1";
    std::string method = "polar_ascent";
    int restarts = 50;
    int samples_per_restart = 200;
    int iterations = 200;
    std::uint64_t seed = 0xC0FFEE;
    double tolerance = 1e-6;
    std::string left;   // product factor, e.g. "alpha=1/3,level=1"
    std::string right;  // product factor, e.g. "alpha=1/4,level=1" or "units=4"
    std::string format = "csv";
    bool unsafe_scale = false;
};

json config_to_json(const RunConfig& c) {
    return json{{"command", c.command},
                {"suite", c.suite},
                {"alpha", c.alpha},
                {"level", c.level},
                {"side", c.side},
                {"p", c.p},
                {"method", c.method},
                {"restarts", c.restarts},
                {"samples_per_restart", c.samples_per_restart},
                {"iterations", c.iterations},
                {"seed", c.seed},
                {"tolerance", c.tolerance},
                {"left", c.left},
                {"right", c.right},
                {"format", c.format},
                {"unsafe_scale", c.unsafe_scale}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.command = j.value("command", c.command);
    c.suite = j.value("suite", c.suite);
    c.alpha = j.value("alpha", c.alpha);
    c.level = j.value("level", c.level);
    c.side = j.value("side", c.side);
    c.p = j.value("p", c.p);
    c.method = j.value("method", c.method);
    c.restarts = j.value("restarts", c.restarts);
    c.samples_per_restart = j.value("samples_per_restart", c.samples_per_restart);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.left = j.value("left", c.left);
    c.right = j.value("right", c.right);
    c.format = j.value("format", c.format);
    c.unsafe_scale = j.value("unsafe_scale", c.unsafe_scale);
    return c;
}

RunConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot read config file: " + path);
    std::string first_line;
    std::getline(in, first_line);
    const std::string marker = "# config ";
    if (first_line.rfind(marker, 0) == 0)
        return config_from_json(json::parse(first_line.substr(marker.size())));
    in.seekg(0);
    json j = json::parse(in);
    if (j.contains("config")) j = j.at("config");
    return config_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::domain_error("cannot write: " + path);
    out << text;
}

EstimationStrategy make_strategy(const RunConfig& c) {
    EstimationStrategy s;
    s.method = method_parse(c.method);
    s.restarts = c.restarts;
    s.samples_per_restart = c.samples_per_restart;
    s.ascent_iterations = c.iterations;
    s.seed = c.seed;
    return s;
}

struct FactorSpec {
    bool is_units = false;
    Eigen::Index units = 0;
    double alpha = 0.5, one_minus_alpha = 0.5;
    int level = 1;
};

FactorSpec parse_factor(const std::string& text) {
    FactorSpec f;
    std::stringstream ss(text);
    std::string item;
    bool saw_any = false;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::domain_error("factor spec needs key=value: " + item);
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "alpha") {
            f.alpha = parse_alpha(value, &f.one_minus_alpha);
            saw_any = true;
        } else if (key == "level") {
            f.level = std::stoi(value);
            saw_any = true;
        } else if (key == "units") {
            f.is_units = true;
            f.units = std::stoll(value);
            saw_any = true;
        } else {
            throw std::domain_error("unknown factor key: " + key);
        }
    }
    if (!saw_any) throw std::domain_error("empty factor spec");
    return f;
}

FactorSystem build_factor(const FactorSpec& f, const NormSpec& spec) {
    if (f.is_units) return FactorSystem::from_matrix_units(f.units);
    return FactorSystem::from_haar(
        HaarSystem::standard(f.alpha, f.one_minus_alpha, f.level, Side::left), spec);
}

// Small-denominator continued-fraction probe for log(lam1)/log(lam2); a hit
// means the pair sits over a III_lambda substructure rather than III_1.
std::string log_ratio_note(double lam1, double lam2) {
    const double ratio = std::log(lam1) / std::log(lam2);
    double x = ratio;
    long long p_prev = 1, q_prev = 0, p_cur = 0, q_cur = 1;
    for (int it = 0; it < 24 && q_cur <= 64; ++it) {
        const double a = std::floor(x);
        const long long ai = static_cast<long long>(a);
        const long long p_next = ai * p_cur + p_prev, q_next = ai * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if (q_cur > 0 && q_cur <= 64 &&
            std::abs(ratio - double(p_cur) / double(q_cur)) < 1e-9) {
            std::ostringstream os;
            os << "log-ratio " << format_double(ratio) << " matches " << p_cur << "/" << q_cur
               << " (III_lambda substructure, not III_1)";
            return os.str();
        }
        const double frac = x - a;
        if (frac < 1e-12) break;
        x = 1.0 / frac;
    }
    std::ostringstream os;
    os << "log-ratio " << format_double(ratio)
       << " has no rational approximation with denominator <= 64 (III_1 regime)";
    return os.str();
}

int cmd_gen_haar(const RunConfig& c, const std::string& out_path) {
    double oma = 0.0;
    const double alpha = parse_alpha(c.alpha, &oma);
    const Side side = side_parse(c.side);
    if (side == Side::plain) throw std::domain_error("gen-haar: side must be left or right");
    const int cap = c.unsafe_scale ? 6 : 4;
    if (c.level < 1 || c.level > cap)
        throw std::domain_error("gen-haar: level out of range (cap " + std::to_string(cap) +
                                ", raise with --unsafe-scale)");
    HaarSystem sys = HaarSystem::standard(alpha, oma, c.level, side);
    double residual = 0.0;
    for (const RademacherQuad& q : sys.quads()) residual = std::max(residual, q.gram_residual());
    write_text(out_path, haar_to_json(sys).dump(2) + "\n");
    std::cerr << "elements " << sys.size() << " gram_residual " << format_double(residual)
              << "\n";
    if (sys.r0_norm_warning())
        std::cerr << "warning: ||r_0|| > 1, partial-sum bounds are not uniform in the level\n";
    return kExitOk;
}

int emit_report(const NormReport& report, const RunConfig& c, const std::string& out_path) {
    json config = config_to_json(c);
    if (c.format == "json")
        write_text(out_path, report_to_json(report, &config).dump(2) + "\n");
    else
        write_text(out_path, report_to_csv(report, &config));
    int scored = 0, passed = 0;
    for (const NormReportRow& row : report.rows) {
        if (!row.counted) continue;
        ++scored;
        if (row.pass) ++passed;
    }
    std::cerr << "suite " << report.suite << " rows " << report.rows.size() << " scored "
              << scored << " passed " << passed << "\n";
    return report.all_pass() ? kExitOk : kExitCertFailure;
}

int cmd_certify(const RunConfig& c, const std::string& out_path) {
    double oma = 0.0;
    const double alpha = parse_alpha(c.alpha, &oma);
    EstimationStrategy strategy = make_strategy(c);
    CertifyOptions options;
    options.tolerance = c.tolerance;
    options.level_cap = c.unsafe_scale ? 6 : 4;
    const PExp p = PExp::parse(c.p);

    if (c.suite == "haar") {
        const Side side = side_parse(c.side);
        if (side == Side::plain)
            throw std::domain_error("certify haar: side must be left or right");
        HaarSystem sys = HaarSystem::standard(alpha, oma, c.level, side);
        if (sys.r0_norm_warning())
            std::cerr << "warning: ||r_0|| > 1, bounds are not uniform in the level\n";
        return emit_report(certify(sys, {p, side}, strategy, options), c, out_path);
    }
    if (c.suite == "schur") {
        Weight w(alpha, oma, c.level);
        std::vector<Side> sides;
        if (c.side == "both")
            sides = {Side::left, Side::right};
        else
            sides = {side_parse(c.side)};
        NormReport merged;
        bool first = true;
        for (Side side : sides) {
            NormReport r = certify_schur(c.level, w, {p, side}, strategy, options);
            if (first) {
                merged = std::move(r);
                first = false;
            } else {
                merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
            }
        }
        return emit_report(merged, c, out_path);
    }
    if (c.suite == "product") {
        if (c.left.empty() || c.right.empty())
            throw std::domain_error("certify product: --left and --right factor specs required");
        const Side side = c.side == "both" ? Side::left : side_parse(c.side);
        NormSpec spec{p, side};
        FactorSpec fl = parse_factor(c.left), fr = parse_factor(c.right);
        FactorSystem a = build_factor(fl, spec);
        FactorSystem b = build_factor(fr, spec);
        NormReport report = product_partial_sum_certify(a, b, spec, strategy, options);
        if (!fl.is_units && !fr.is_units) {
            const double lam1 = fl.alpha / fl.one_minus_alpha;
            const double lam2 = fr.alpha / fr.one_minus_alpha;
            if (lam1 < 1.0 && lam2 < 1.0) report.notes.push_back(log_ratio_note(lam1, lam2));
        }
        return emit_report(report, c, out_path);
    }
    throw std::domain_error("unknown certify suite: " + c.suite);
}

class CheckPrinter {
public:
    void check(const std::string& name, double value, double tol) {
        const bool ok = value <= tol;
        std::cout << (ok ? "ok " : "FAIL ") << name << " value=" << format_double(value)
                  << " tol=" << format_double(tol) << "\n";
        failed_ = failed_ || !ok;
    }
    void check_flag(const std::string& name, bool ok) {
        std::cout << (ok ? "ok " : "FAIL ") << name << "\n";
        failed_ = failed_ || !ok;
    }
    int exit_code() const { return failed_ ? kExitCertFailure : kExitOk; }

private:
    bool failed_ = false;
};

int cmd_verify(const RunConfig& c, double t_param) {
    double oma = 0.0;
    const double alpha = parse_alpha(c.alpha, &oma);
    CheckPrinter out;
    Rng rng(c.seed);

    if (c.suite == "gram") {
        for (Side side : {Side::left, Side::right}) {
            RademacherQuad q = standard_quad(alpha, oma, side);
            out.check("gram." + side_name(side) + ".residual", q.gram_residual(), 1e-12);
        }
    } else if (c.suite == "expansion") {
        HaarSystem sys = HaarSystem::standard(alpha, oma, c.level, side_parse(c.side));
        double worst = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            Mat x = rng.gaussian_matrix(sys.dim());
            const double err = max_abs_diff(sys.synthesize(sys.analyze(x)), x) /
                               schatten_norm(x, PExp::inf());
            worst = std::max(worst, err);
        }
        out.check("expansion.round_trip.relative", worst, 1e-10);
    } else if (c.suite == "expectation") {
        Weight w(alpha, oma, c.level + 1);
        const Eigen::Index half = Eigen::Index(1) << c.level;
        double elementary = 0.0, module = 0.0, contract = 0.0;
        NormSpec tc{PExp::finite(1.0), Side::left};
        for (int rep = 0; rep < 200; ++rep) {
            Mat a = rng.gaussian_matrix(half), b = rng.gaussian_matrix(2);
            Mat lhs = expect_level(w, kron(a, b));
            elementary = std::max(
                elementary, max_abs_diff(lhs, Mat(state(Weight(alpha, oma, 1), b) * a)));
            Mat x = rng.gaussian_matrix(2 * half), bb = rng.gaussian_matrix(half);
            module = std::max(module, max_abs_diff(expect_level(w, embed(a) * x * embed(bb)),
                                                   a * expect_level(w, x) * bb));
            const double before = weighted_norm(x, w.density(), tc);
            const double after = weighted_norm(embed(expect_level(w, x)), w.density(), tc);
            contract = std::max(contract, (after - before) / std::max(before, 1e-300));
        }
        out.check("expectation.elementary.residual", elementary, 1e-12);
        out.check("expectation.module.residual", module, 1e-12);
        out.check("expectation.contractivity.excess", contract, 1e-12);
    } else if (c.suite == "measure") {
        const int cap = c.unsafe_scale ? 20 : 10;
        if (c.level > cap) throw std::domain_error("measure: level cap exceeded");
        MeasureTable t = distorted_measure(alpha, oma, c.level);
        double sum = 0.0;
        for (double m : t.masses) sum += m;
        out.check("measure.total.residual", std::abs(sum - 1.0), 1e-14);
        Weight w(alpha, oma, std::min(c.level, 12));
        double ident = 0.0;
        if (w.level() == c.level)
            for (size_t k = 0; k < t.masses.size(); ++k)
                ident = std::max(
                    ident, std::abs(t.masses[k] - w.density().values()[Eigen::Index(k)]));
        out.check("measure.state_identity.residual", ident, 1e-15);
    } else if (c.suite == "kms") {
        Weight w(alpha, oma, c.level);
        Mat x = rng.gaussian_matrix(w.dim()), y = rng.gaussian_matrix(w.dim());
        const Complex lower = kms_function(w, x, y, Complex(t_param, 0.0));
        const Complex upper = kms_function(w, x, y, Complex(t_param, 1.0));
        out.check("kms.lower_boundary.residual",
                  std::abs(lower - state(w, modular_flow(w, t_param, x) * y)), 1e-10);
        out.check("kms.upper_boundary.residual",
                  std::abs(upper - state(w, y * modular_flow(w, t_param, x))), 1e-10);
    } else if (c.suite == "commutative") {
        CommutativeSystem cs = commutative_haar(alpha, oma, c.level);
        if (alpha == 0.5) {
            double diff = 0.0;
            for (size_t j = 0; j < cs.chi.size(); ++j)
                diff = std::max(diff,
                                (cs.step_values[j] - classical_haar_values(int(j), c.level))
                                    .cwiseAbs()
                                    .maxCoeff());
            out.check("commutative.classical_haar.residual", diff, 0.0);
        }
        HaarSystem sys = HaarSystem::standard(alpha, oma, std::min(c.level, 4), Side::left);
        CommutativeSystem ref = commutative_haar(alpha, oma, sys.level());
        size_t slot = 0;
        bool selection_ok = true;
        for (size_t j = 0; j < sys.size(); ++j) {
            Mat pick = expect_diagonal(sys.element(j));
            if (pick.cwiseAbs().maxCoeff() > 1e-15) {
                selection_ok = selection_ok && slot < ref.chi.size() &&
                               max_abs_diff(pick, ref.chi[slot]) < 1e-15;
                ++slot;
            }
        }
        out.check_flag("commutative.selection_matches", selection_ok && slot == ref.chi.size());
    } else if (c.suite == "tensor") {
        ProductAlgebra pa{FactorState::from_weight(Weight(alpha, oma, 1)),
                          FactorState::from_weight(Weight(0.25, 1))};
        DecompositionSystem ds =
            DecompositionSystem::from_haar(HaarSystem::standard(0.25, 1, Side::left));
        double ortho = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            Mat z = rng.gaussian_matrix(4);
            for (size_t j = 0; j < ds.size(); ++j) {
                Mat dj = decomposition_project(pa, ds, j, z);
                ortho = std::max(ortho, max_abs_diff(decomposition_project(pa, ds, j, dj), dj));
                for (size_t k = 0; k < ds.size(); ++k)
                    if (k != j)
                        ortho = std::max(
                            ortho,
                            decomposition_project(pa, ds, k, dj).cwiseAbs().maxCoeff());
            }
        }
        out.check("tensor.decomposition.residual", ortho, 1e-10);
        double iso = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            Mat x = rng.gaussian_matrix(4);
            for (double p : {1.0, 2.0, 3.0}) {
                PExp pe = PExp::finite(p);
                iso = std::max(iso, std::abs(schatten_norm(lp_embed(x, pe, alpha, oma), pe) -
                                             schatten_norm(x, pe)));
            }
        }
        out.check("tensor.lp_embed.residual", iso, 1e-12);
    } else if (c.suite == "shell") {
        bool bijective = true;
        for (int n : {8, 64}) {
            std::vector<int> seen(size_t(n) * size_t(n), 0);
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k) {
                    const int s = shell_index(j, k);
                    bijective = bijective && s >= 1 && s <= n * n;
                    if (bijective) seen[size_t(s - 1)] += 1;
                    auto [jj, kk] = shell_pair(s);
                    bijective = bijective && jj == j && kk == k;
                }
            for (int cnt : seen) bijective = bijective && cnt == 1;
        }
        out.check_flag("shell.bijection.n<=64", bijective);
    } else {
        throw std::domain_error("unknown verify suite: " + c.suite);
    }
    return out.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Haar systems in weighted matrix algebras: construction, expansion, and "
                 "partial-sum norm certification"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_path, config_path;
    double t_param = 0.3;

    CLI::App* gen =
        app.add_subcommand("gen-haar", "construct a Haar system and write it as JSON");
    gen->add_option("--alpha", cfg.alpha, "state parameter in (0, 1/2], decimal or fraction");
    gen->add_option("--level", cfg.level, "tensor level nu");
    gen->add_option("--side", cfg.side, "left or right system");
    gen->add_option("--out", out_path, "output path (stdout if omitted)");
    gen->add_flag("--unsafe-scale", cfg.unsafe_scale, "raise the level cap");

    CLI::App* cert = app.add_subcommand("certify", "estimate partial-sum norms against bounds");
    cert->add_option("--suite", cfg.suite, "haar, schur or product");
    cert->add_option("--alpha", cfg.alpha, "state parameter, decimal or fraction");
    cert->add_option("--level", cfg.level, "tensor level nu");
    cert->add_option("--side", cfg.side, "left, right (schur also: both)");
    cert->add_option("--p", cfg.p, "Schatten exponent in [1, inf], e.g. 1, 2, inf");
    cert->add_option("--method", cfg.method, "sampling, polar_ascent or grid_oracle");
    cert->add_option("--restarts", cfg.restarts, "estimation restarts");
    cert->add_option("--samples-per-restart", cfg.samples_per_restart, "samples per restart");
    cert->add_option("--iterations", cfg.iterations, "ascent iteration cap");
    cert->add_option("--seed", cfg.seed, "deterministic seed")->envname("NCBASIS_SEED");
    cert->add_option("--tolerance", cfg.tolerance, "pass tolerance for estimate <= bound");
    cert->add_option("--left", cfg.left, "product left factor, e.g. alpha=1/3,level=1");
    cert->add_option("--right", cfg.right, "product right factor, e.g. alpha=1/4 or units=4");
    cert->add_option("--format", cfg.format, "csv or json");
    cert->add_option("--out", out_path, "report path (stdout if omitted)");
    cert->add_option("--config", config_path, "re-run from a config or report file");
    cert->add_flag("--unsafe-scale", cfg.unsafe_scale, "raise the level cap");

    CLI::App* ver = app.add_subcommand("verify", "run a named invariant suite");
    ver->add_option("--suite", cfg.suite,
                    "gram, expansion, expectation, measure, kms, commutative, tensor, shell")
        ->required();
    ver->add_option("--alpha", cfg.alpha, "state parameter, decimal or fraction");
    ver->add_option("--level", cfg.level, "tensor level nu");
    ver->add_option("--side", cfg.side, "system side for expansion checks");
    ver->add_option("--t", t_param, "modular time parameter for the kms suite");
    ver->add_option("--seed", cfg.seed, "deterministic seed")->envname("NCBASIS_SEED");
    ver->add_flag("--unsafe-scale", cfg.unsafe_scale, "raise the level cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            cfg.command = "gen-haar";
            return cmd_gen_haar(cfg, out_path);
        }
        if (cert->parsed()) {
            if (!config_path.empty()) cfg = config_from_file(config_path);
            cfg.command = "certify";
            return cmd_certify(cfg, out_path);
        }
        cfg.command = "verify";
        return cmd_verify(cfg, t_param);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
