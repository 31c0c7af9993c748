// Command-line front end: analyze | carleson | keylemma | construct | approx.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsym/approx.hpp"
#include "dsym/carleson.hpp"
#include "dsym/classify.hpp"
#include "dsym/flat.hpp"
#include "dsym/keylemma.hpp"
#include "dsym/report.hpp"

namespace {

using namespace dsym;
using nlohmann::json;

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
}

DirichletSymbol load_symbol(const std::string& symbol_arg, const std::string& file_arg) {
    if (!file_arg.empty()) return load_symbol_file(file_arg);
    if (symbol_arg.empty()) throw CLI::ValidationError("--symbol or --file is required");
    // treat an existing path as a file, anything else as an expression
    std::ifstream probe(symbol_arg);
    if (probe.good() &&
        (symbol_arg.find(".json") != std::string::npos || symbol_arg.find('/') != std::string::npos))
        return load_symbol_file(symbol_arg);
    return parse_symbol_any(symbol_arg);
}

struct AnalysisBundle {
    SymbolProfile profile;
    BohrLift lift;
    BoundaryScan scan;
    CompactnessVerdict verdict;
};

AnalysisBundle analyze_symbol(const DirichletSymbol& sym, std::uint64_t /*seed*/) {
    AnalysisBundle b;
    b.profile = degree_profile(sym);
    if (!b.profile.class_member) throw ClassViolation("symbol is not a class member");
    if (b.profile.dimension > 0) {
        b.lift = range_lift(sym, b.profile.optimal_set);
        b.scan = find_boundary_points(b.lift);
    } else {
        b.lift.constant_exact = sym.c1 - RationalComplex(Rational(1, 2));
        b.lift.constant = b.lift.constant_exact.to_complex();
        b.scan.range_kind = b.profile.range_kind;
        b.scan.global_min = b.profile.min_re;
    }
    b.verdict = classify_compactness(b.profile, b.lift, b.scan);
    return b;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet polynomial composition-operator analyzer"};
    app.require_subcommand(1);

    std::string symbol_arg, file_arg, out_arg, format = "json";
    std::uint64_t seed = 1;
    long long samples = 1000000;
    double eps_max = 0.2, eps_min = 0.0125;
    bool exact = false;

    auto add_common = [&](CLI::App* cmd, bool with_symbol = true) {
        if (with_symbol) {
            cmd->add_option("--symbol", symbol_arg, "symbol expression or JSON");
            cmd->add_option("--file", file_arg, "file holding the symbol");
        }
        cmd->add_option("--seed", seed, "sampler seed");
        cmd->add_option("--out", out_arg, "output path (default stdout)");
        cmd->add_option("--format", format, "json|csv");
    };

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "structure, boundary points, verdict");
    bool with_carleson = false, with_eta = false;
    add_common(cmd_analyze);
    cmd_analyze->add_flag("--carleson", with_carleson, "attach a Carleson exponent fit");
    cmd_analyze->add_flag("--eta", with_eta, "attach the compactness index");
    cmd_analyze->add_option("--samples", samples, "samples per eps cell");
    cmd_analyze->add_option("--eps-max", eps_max);
    cmd_analyze->add_option("--eps-min", eps_min);

    // carleson
    auto* cmd_carleson = app.add_subcommand("carleson", "box-measure exponent estimation");
    add_common(cmd_carleson);
    cmd_carleson->add_option("--samples", samples, "samples per eps cell");
    cmd_carleson->add_option("--eps-max", eps_max);
    cmd_carleson->add_option("--eps-min", eps_min);

    // keylemma
    auto* cmd_keylemma = app.add_subcommand("keylemma", "factorization-equation residuals");
    std::string a1_s = "1/2", a2_s = "1/2", imc_s = "0";
    int grid_n = 0;
    add_common(cmd_keylemma, false);
    cmd_keylemma->add_option("--a1", a1_s, "a1 (rational)");
    cmd_keylemma->add_option("--a2", a2_s, "a2 (rational)");
    cmd_keylemma->add_option("--imc", imc_s, "Im c (rational)");
    cmd_keylemma->add_flag("--exact", exact, "exact rational pipeline");
    cmd_keylemma->add_option("--grid", grid_n, "sweep an n x n admissible grid");

    // construct
    auto* cmd_construct = app.add_subcommand("construct", "flat and counterexample symbols");
    std::vector<int> flat_args;
    std::string separated_arg, cex_kind_arg, poly_arg = "z2", delta_s = "1/10";
    add_common(cmd_construct, false);
    cmd_construct->add_option("--flat", flat_args, "k [N]: boundary-flat one-variable symbol");
    cmd_construct->add_option("--separated", separated_arg, "comma list of even orders");
    cmd_construct->add_option("--counterexample", cex_kind_arg, "cex3|cex5a|cex5b");
    cmd_construct->add_option("--delta", delta_s, "family parameter (rational)");
    cmd_construct->add_option("--poly", poly_arg, "polynomial factor, e.g. \"z2\"");

    // approx
    auto* cmd_approx = app.add_subcommand("approx", "boundary regularity and decay data");
    bool do_eta = false, do_omega = false, do_witness = false, do_probe = false;
    double delta_w = 1e-3, nu_w = 8.0;
    int probe_m = 256, probe_d = 24;
    add_common(cmd_approx);
    cmd_approx->add_flag("--eta", do_eta, "compactness index");
    cmd_approx->add_flag("--omega", do_omega, "contact exponent fit");
    cmd_approx->add_flag("--witness", do_witness, "preimage lattice witness");
    cmd_approx->add_flag("--probe", do_probe, "truncated matrix probe");
    cmd_approx->add_option("--delta", delta_w, "witness delta");
    cmd_approx->add_option("--nu", nu_w, "witness nu");
    cmd_approx->add_option("--M", probe_m, "probe basis cap");
    cmd_approx->add_option("--D", probe_d, "probe degree cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_analyze->parsed() || cmd_carleson->parsed()) {
            DirichletSymbol sym = load_symbol(symbol_arg, file_arg);
            AnalysisBundle b = analyze_symbol(sym, seed);
            AnalysisReport rep;
            rep.symbol_text = symbol_arg.empty() ? file_arg : symbol_arg;
            rep.symbol = sym;
            rep.profile = b.profile;
            rep.scan = b.scan;
            rep.verdict = b.verdict;
            rep.seed = seed;
            bool want_fit = cmd_carleson->parsed() || with_carleson;
            if (want_fit && b.profile.dimension > 0) {
                SampleConfig cfg;
                cfg.seed = seed;
                for (auto& bp : b.scan.points) cfg.centers.push_back(bp.theta);
                rep.carleson = kappa_fit(b.lift, eps_max, eps_min, samples, cfg);
            }
            if ((with_eta || cmd_analyze->parsed()) && b.profile.dimension >= 2 &&
                b.scan.range_kind == RangeKind::Unrestricted) {
                try {
                    rep.regularity = compactness_index(b.lift, b.scan);
                } catch (const std::domain_error&) {
                    // boundary regularity not supported for this symbol; omit
                }
            }
            if (cmd_carleson->parsed() && format == "csv" && rep.carleson) {
                write_output(out_arg, fit_to_csv(*rep.carleson));
            } else {
                std::string text = report_to_json(rep);
                report_roundtrip_check(text);
                write_output(out_arg, text);
            }
        } else if (cmd_keylemma->parsed()) {
            json j;
            if (grid_n > 0) {
                json nodes = json::array();
                for (int i = 1; i <= grid_n; ++i) {
                    for (int k = 1; k <= grid_n; ++k) {
                        Rational a1(i, grid_n), a2(k, grid_n);
                        KeylemmaParams p;
                        p.a1 = a1;
                        p.a2 = a2;
                        p.im_c = 0;
                        if (!p.valid()) continue;
                        auto attempt = attempt_factorization(p);
                        json node;
                        node["a1"] = rational_to_string(a1);
                        node["a2"] = rational_to_string(a2);
                        node["obstruction"] = attempt.obstruction.has_value();
                        if (attempt.obstruction) {
                            node["part"] = std::string(1, attempt.obstruction->part);
                            node["order"] = total_degree(attempt.obstruction->index);
                        }
                        nodes.push_back(node);
                    }
                }
                j["grid"] = nodes;
            } else {
                Rational a1 = parse_rational(a1_s), a2 = parse_rational(a2_s),
                         imc = parse_rational(imc_s);
                EquationReport rep =
                    exact ? keylemma_equations(a1, a2, imc)
                          : keylemma_equations_d(to_double(a1), to_double(a2), to_double(imc));
                j["a1"] = rep.a1;
                j["a2"] = rep.a2;
                j["im_c"] = rep.im_c;
                j["im_b1"] = rep.im_b1;
                j["im_b2"] = rep.im_b2;
                j["residual_eq6"] = rep.residual_eq6;
                j["residual_eq7"] = rep.residual_eq7;
                j["residual_gamma02"] = rep.residual_gamma02;
                j["residual_eq9"] = rep.residual_eq9;
                if (rep.eq8_applicable) j["residual_eq8"] = rep.residual_eq8;
                KeylemmaParams p;
                p.a1 = a1;
                p.a2 = a2;
                p.im_c = imc;
                derive_im_b(p.a1, p.a2, p.im_c, p.im_b1, p.im_b2);
                auto attempt = attempt_factorization(p);
                j["obstruction"] = attempt.obstruction.has_value();
                if (attempt.obstruction) {
                    j["obstruction_part"] = std::string(1, attempt.obstruction->part);
                    j["obstruction_order"] = total_degree(attempt.obstruction->index);
                    j["obstruction_residual"] = attempt.obstruction->residual;
                }
            }
            write_output(out_arg, j.dump(2) + "\n");
        } else if (cmd_construct->parsed()) {
            CertifiedLift built;
            if (!flat_args.empty()) {
                int k = flat_args[0];
                int N = flat_args.size() > 1 ? flat_args[1] : (k + 1) / 2;
                if (k < 1 || N < (k + 1) / 2) throw CLI::ValidationError("--flat k [N >= ceil(k/2)]");
                std::vector<Rational> target(2 * N, Rational(0));
                target[k - 1] = Rational(1);
                FlatPolynomial flat = build_flat_polynomial(target);
                std::vector<std::pair<Midx, RationalComplex>> coeffs;
                for (size_t i = 1; i < flat.poly_z.size(); ++i)
                    coeffs.emplace_back(Midx{static_cast<int>(i)},
                                        RationalComplex(flat.poly_z[i]));
                built.lift = lift_from_coefficients(RationalComplex(flat.poly_z[0]), coeffs, {2});
                built.symbol = symbol_from_lift(built.lift);
                built.certified = true;
            } else if (!separated_arg.empty()) {
                std::vector<int> orders;
                std::stringstream ss(separated_arg);
                std::string tok;
                while (std::getline(ss, tok, ',')) orders.push_back(std::stoi(tok));
                built.lift = build_separated_example(orders);
                built.symbol = symbol_from_lift(built.lift);
                built.certified = true;
            } else if (!cex_kind_arg.empty()) {
                CexKind kind;
                if (cex_kind_arg == "cex3")
                    kind = CexKind::Cex3;
                else if (cex_kind_arg == "cex5a")
                    kind = CexKind::Cex5a;
                else if (cex_kind_arg == "cex5b")
                    kind = CexKind::Cex5b;
                else
                    throw CLI::ValidationError("--counterexample cex3|cex5a|cex5b");
                PolyFactor P = parse_poly_factor(poly_arg, 2);
                built = counterexample_factory(kind, parse_rational(delta_s), P);
            } else {
                throw CLI::ValidationError("construct: pick --flat, --separated or --counterexample");
            }
            json j;
            j["symbol"] = json::parse(symbol_to_json(built.symbol));
            j["symbol_text"] = print_symbol(built.symbol);
            j["certification"] = {{"grid_min", built.grid_min},
                                  {"lipschitz_margin", built.lipschitz_margin},
                                  {"certified", built.certified}};
            write_output(out_arg, j.dump(2) + "\n");
        } else if (cmd_approx->parsed()) {
            DirichletSymbol sym = load_symbol(symbol_arg, file_arg);
            AnalysisBundle b = analyze_symbol(sym, seed);
            json j;
            if (do_eta || (!do_omega && !do_witness && !do_probe)) {
                auto ci = compactness_index(b.lift, b.scan);
                j["eta"] = ci.eta;
            }
            if (do_omega) {
                OmegaConfig cfg;
                cfg.seed = seed;
                auto ce = omega_estimate(b.lift, b.scan, cfg);
                j["omega_hat"] = ce.omega_hat;
                j["C"] = ce.C;
                j["restricted"] = ce.restricted;
            }
            if (do_witness) {
                if (b.scan.points.size() != 1)
                    throw std::runtime_error("witness needs a unique boundary point");
                auto prof = boundary_regularity(b.lift, b.scan.points.front());
                auto w = lower_bound_witness(b.lift, prof, delta_w, nu_w);
                j["witness"] = {{"delta", w.delta},
                                {"nu", w.nu},
                                {"s_count", w.s_count},
                                {"preimages_per_s", w.preimages_per_s},
                                {"max_residual", w.max_residual},
                                {"min_separation", w.min_separation},
                                {"c1_fitted", w.c1_fitted},
                                {"rho_ratio", w.rho_ratio},
                                {"lower_bound_quantity", w.lower_bound_quantity},
                                {"violations", w.violations}};
                if (format == "csv") {
                    write_output(out_arg, witness_to_csv(w));
                    return 0;
                }
            }
            if (do_probe) {
                auto pr = truncated_matrix_probe(sym, b.profile.optimal_set, probe_m, probe_d);
                j["probe"] = {{"ncols", pr.ncols},
                              {"decay_exponent", pr.decay_exponent},
                              {"r2", pr.fit_r2},
                              {"window", {pr.window_lo, pr.window_hi}},
                              {"min_column_mass", pr.min_column_mass},
                              {"singular_values", pr.singular_values}};
            }
            write_output(out_arg, j.dump(2) + "\n");
        }
    } catch (const ClassViolation& e) {
        std::cerr << "class membership rejected: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
