// Command-line front end: every experiment and measure in the library as a
// deterministic report generator. Formats: human (4-decimal), structured
// (JSON, full precision, byte-stable) and csv (grid series).
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fockent/dynamics.hpp"
#include "fockent/entropy.hpp"
#include "fockent/fock.hpp"
#include "fockent/interferometer.hpp"
#include "fockent/measures.hpp"
#include "fockent/overlap.hpp"
#include "fockent/state_io.hpp"
#include "fockent/states.hpp"
#include "fockent/teleport.hpp"

namespace {

using namespace fockent;
using nlohmann::ordered_json;

// Command-line usage problems that surface after flag parsing (grid syntax,
// amplitude syntax, format/subcommand mismatches). Exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Human, Structured, Csv };

Format format_from_string(const std::string& s) {
    if (s == "human") return Format::Human;
    if (s == "structured") return Format::Structured;
    return Format::Csv;
}

// ---------------------------------------------------------------------------
// number formatting

// Human mode: round to 4 decimals, trim trailing zeros, keep one decimal.
std::string fmt_human(double v) {
    if (!std::isfinite(v)) return "nan";
    double r = std::round(v * 1e4) / 1e4;
    if (r == 0.0) r = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", r);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

// Full precision for CSV cells; structured mode goes through JSON doubles.
std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Short form for tolerance values (1e-14 style).
std::string fmt_tol(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_human_cplx(Cplx z) {
    const double re = std::round(z.real() * 1e4) / 1e4;
    const double im = std::round(z.imag() * 1e4) / 1e4;
    if (im == 0.0) return fmt_human(re);
    std::string s = fmt_human(re);
    s += (im < 0 ? " - " : " + ") + fmt_human(std::abs(im)) + "i";
    return s;
}

// ---------------------------------------------------------------------------
// argument parsing helpers

// Grid syntax start:end:count -> `count` evenly spaced points, ascending.
std::vector<double> parse_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw UsageError("grid must be start:end:count, got: " + spec);
    auto number = [&](const std::string& t) {
        char* endp = nullptr;
        const double v = std::strtod(t.c_str(), &endp);
        if (t.empty() || endp != t.c_str() + t.size())
            throw UsageError("grid field is not a number: " + t);
        return v;
    };
    const double start = number(spec.substr(0, c1));
    const double end = number(spec.substr(c1 + 1, c2 - c1 - 1));
    const double countf = number(spec.substr(c2 + 1));
    const int count = static_cast<int>(countf);
    if (countf != count || count < 1)
        throw UsageError("grid count must be a positive integer, got: " + spec.substr(c2 + 1));
    if (end < start) throw UsageError("grid must be sorted: end >= start");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i)
        out.push_back(start + (end - start) * i / (count - 1));
    return out;
}

// One complex amplitude: "1", "-0.5", "2i", "1+2i", "1-2i", "i", "-i".
Cplx parse_complex(const std::string& token) {
    std::string t;
    for (char c : token)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    auto full_double = [](const std::string& s, double& out) {
        if (s.empty()) return false;
        char* endp = nullptr;
        out = std::strtod(s.c_str(), &endp);
        return endp == s.c_str() + s.size();
    };
    double re = 0.0, im = 0.0;
    if (full_double(t, re)) return {re, 0.0};
    if (!t.empty() && (t.back() == 'i' || t.back() == 'j')) {
        std::string body = t.substr(0, t.size() - 1);
        if (body.empty() || body == "+") return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        if (full_double(body, im)) return {0.0, im};
        for (std::size_t k = body.size() - 1; k > 0; --k) {
            const char c = body[k];
            if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                std::string rs = body.substr(0, k), is = body.substr(k);
                if (is == "+") is = "1";
                if (is == "-") is = "-1";
                if (full_double(rs, re) && full_double(is, im)) return {re, im};
                break;
            }
        }
    }
    throw UsageError("cannot parse complex amplitude: " + token);
}

Eigen::Vector4cd parse_source(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4)
        throw UsageError("source needs exactly four comma-separated amplitudes");
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = parse_complex(parts[static_cast<std::size_t>(i)]);
    const double n = v.norm();
    if (n <= 0.0) throw UsageError("source must have nonzero norm");
    return v / n;
}

// ---------------------------------------------------------------------------
// tolerance embedding

using TolSet = std::vector<std::pair<std::string, double>>;

ordered_json tolerances_json(const TolSet& tols) {
    ordered_json j = ordered_json::object();
    for (const auto& [name, v] : tols) j[name] = v;
    return j;
}

void print_tolerances_human(const TolSet& tols) {
    std::cout << "tolerances:\n";
    for (const auto& [name, v] : tols)
        std::cout << "  " << name << " = " << fmt_tol(v) << "\n";
}

void print_tolerances_csv(const TolSet& tols) {
    for (const auto& [name, v] : tols)
        std::cout << "# tolerance " << name << " = " << fmt_tol(v) << "\n";
}

TolSet state_tols() {
    return {{"amplitude_prune", kAmplitudePruneTol}};
}

TolSet density_tols() {
    return {{"density_hermiticity", kDensityHermTol},
            {"density_trace", kDensityTraceTol},
            {"eigenvalue_clamp", kEigClampTol}};
}

void append(TolSet& a, const TolSet& b) { a.insert(a.end(), b.begin(), b.end()); }

// ---------------------------------------------------------------------------
// shared report pieces

ordered_json report_json(const EntanglementReport& r) {
    ordered_json j;
    j["total_entropy"] = r.total_entropy;
    j["sector_eigenvalues"] = ordered_json::object();
    for (const auto& [label, eigs] : r.sector_eigenvalues) j["sector_eigenvalues"][label] = eigs;
    j["sector_contributions"] = ordered_json::object();
    for (const auto& [label, c] : r.sector_contributions) j["sector_contributions"][label] = c;
    j["off_block_norm"] = r.off_block_norm;
    return j;
}

void print_report_human(const EntanglementReport& r, const std::string& indent) {
    std::cout << indent << "total entropy: " << fmt_human(r.total_entropy) << " bits\n";
    std::cout << indent << "sector eigenvalues:\n";
    for (const auto& [label, eigs] : r.sector_eigenvalues) {
        std::cout << indent << "  " << label << ": ";
        for (std::size_t i = 0; i < eigs.size(); ++i)
            std::cout << (i ? ", " : "") << fmt_human(eigs[i]);
        std::cout << "\n";
    }
    std::cout << indent << "sector contributions:\n";
    for (const auto& [label, c] : r.sector_contributions)
        std::cout << indent << "  " << label << ": " << fmt_human(c) << " bits\n";
    std::cout << indent << "off-block norm: " << fmt_human(r.off_block_norm) << "\n";
}

void require_not_csv(Format fmt, const std::string& cmd) {
    if (fmt == Format::Csv)
        throw UsageError("csv format applies to grid subcommands only, not " + cmd);
}

// The four spin coefficients of a localized two-site state (one particle of
// definite spin per site), or nothing if the state is not of that shape. The
// coefficient order is (up up, up dn, dn up, dn dn) across the two sorted
// sites; all four patterns build with positive sign under the canonical
// ladder convention, so this is a plain amplitude read-off.
std::optional<std::array<Cplx, 4>> try_spin_coefficients(const QuantumState& s) {
    const ModeSystem& sys = s.system();
    const auto sites = sys.site_names();
    if (sys.size() != 4 || sites.size() != 2) return std::nullopt;
    for (const auto& site : sites)
        if (!sys.contains({site, Spin::Up}) || !sys.contains({site, Spin::Down}))
            return std::nullopt;
    auto site_count = [&](const OccupationPattern& p, const std::string& site) {
        int n = 0;
        for (std::size_t i : sys.site_mode_indices(site)) n += p[i];
        return n;
    };
    for (const auto& [pat, amp] : s.amplitudes())
        if (site_count(pat, sites[0]) != 1 || site_count(pat, sites[1]) != 1)
            return std::nullopt;
    auto amp_of = [&](Spin first, Spin second) {
        OccupationPattern p(4, 0);
        p[sys.index_of({sites[0], first})] = 1;
        p[sys.index_of({sites[1], second})] = 1;
        return s.amplitude(p);
    };
    return std::array<Cplx, 4>{amp_of(Spin::Up, Spin::Up), amp_of(Spin::Up, Spin::Down),
                               amp_of(Spin::Down, Spin::Up), amp_of(Spin::Down, Spin::Down)};
}

bool is_two_particle(const QuantumState& s) {
    for (const auto& [pat, amp] : s.amplitudes())
        if (total_count(pat) != 2) return false;
    return !s.is_zero();
}

// ---------------------------------------------------------------------------
// state-info

void run_state_info(const std::string& path, const std::string& save_path, Format fmt) {
    require_not_csv(fmt, "state-info");
    const LoadedState loaded = load_state_file(path);
    const QuantumState& s = loaded.state;
    const ModeSystem& sys = s.system();
    const BasisEnumeration basis(sys);
    if (!save_path.empty()) save_state_file(s, save_path);

    std::map<int, double> sector_weights;
    for (const auto& [pat, amp] : s.amplitudes()) sector_weights[total_count(pat)] += std::norm(amp);

    TolSet tols = state_tols();
    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "state-info";
        doc["statistics"] = to_string(sys.statistics());
        doc["modes"] = ordered_json::array();
        for (const auto& m : sys.modes()) doc["modes"].push_back(m.str());
        if (sys.statistics() == Statistics::Boson) doc["nmax"] = sys.nmax();
        doc["basis_dimension"] = basis.dimension();
        doc["term_count"] = s.term_count();
        doc["stored_norm"] = loaded.original_norm;
        if (!save_path.empty()) doc["saved_to"] = save_path;
        doc["sector_weights"] = ordered_json::object();
        for (const auto& [n, w] : sector_weights) doc["sector_weights"][std::to_string(n)] = w;
        doc["terms"] = ordered_json::array();
        for (const auto& [pat, amp] : s.amplitudes()) {
            ordered_json jt;
            jt["occupations"] = ordered_json::array();
            for (auto n : pat) jt["occupations"].push_back(static_cast<int>(n));
            jt["re"] = amp.real();
            jt["im"] = amp.imag();
            doc["terms"].push_back(jt);
        }
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "state info\n";
    std::cout << "  statistics: " << to_string(sys.statistics()) << "\n";
    std::cout << "  modes (canonical order): ";
    for (std::size_t i = 0; i < sys.size(); ++i)
        std::cout << (i ? ", " : "") << sys.mode(i).str();
    std::cout << "\n";
    if (sys.statistics() == Statistics::Boson) std::cout << "  nmax: " << sys.nmax() << "\n";
    std::cout << "  basis dimension: " << basis.dimension() << "\n";
    std::cout << "  stored norm: " << fmt_human(loaded.original_norm) << "\n";
    if (!save_path.empty()) std::cout << "  saved normalized state: " << save_path << "\n";
    std::cout << "  terms: " << s.term_count() << "\n";
    std::cout << "  sector weights:\n";
    for (const auto& [n, w] : sector_weights)
        std::cout << "    n=" << n << ": " << fmt_human(w) << "\n";
    std::cout << "  normalized amplitudes:\n";
    for (const auto& [pat, amp] : s.amplitudes())
        std::cout << "    [" << pattern_to_string(pat) << "]  " << fmt_human_cplx(amp) << "\n";
    print_tolerances_human(tols);
}

// ---------------------------------------------------------------------------
// measure

void run_measure(const std::string& path, std::string site, Format fmt) {
    require_not_csv(fmt, "measure");
    const LoadedState loaded = load_state_file(path);
    const QuantumState& s = loaded.state;
    const ModeSystem& sys = s.system();
    if (site.empty()) site = sys.site_names().back();

    const EntanglementReport rep = site_entropy_measure(s, site);

    std::optional<double> eta;
    std::optional<SlaterDecomposition> slater;
    if (sys.statistics() == Statistics::Fermion && sys.size() == 4 && is_two_particle(s)) {
        const WMatrix w = w_from_state(s);
        eta = schliemann_eta(w);
        slater = slater_decompose(w);
    }
    std::optional<WoottersReport> wootters;
    if (const auto coeffs = try_spin_coefficients(s))
        wootters = wootters_report((*coeffs)[0], (*coeffs)[1], (*coeffs)[2], (*coeffs)[3]);

    TolSet tols = state_tols();
    append(tols, density_tols());
    append(tols, {{"w_symmetry", kWSymmetryTol}, {"slater_rank", kSlaterRankTol}});

    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "measure";
        doc["site"] = site;
        doc["stored_norm"] = loaded.original_norm;
        doc["site_entropy"] = report_json(rep);
        doc["eta"] = eta ? ordered_json(*eta) : ordered_json(nullptr);
        if (slater) {
            ordered_json js;
            js["rank"] = slater->rank;
            js["coefficients"] = {slater->coefficients[0], slater->coefficients[1]};
            js["reconstruction_error"] = slater->reconstruction_error;
            doc["slater"] = js;
        } else {
            doc["slater"] = nullptr;
        }
        if (wootters) {
            ordered_json jw;
            jw["tau"] = wootters->tau;
            jw["entropy"] = wootters->entropy;
            jw["x"] = wootters->x;
            doc["wootters"] = jw;
        } else {
            doc["wootters"] = nullptr;
        }
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "measure report\n";
    std::cout << "  site: " << site << "\n";
    std::cout << "  site entropy " << fmt_human(rep.total_entropy) << " bits\n";
    print_report_human(rep, "  ");
    if (eta) {
        std::cout << "  eta " << fmt_human(*eta) << "\n";
        std::cout << "  Slater rank " << slater->rank << "\n";
        std::cout << "  Slater coefficients: " << fmt_human(slater->coefficients[0]) << ", "
                  << fmt_human(slater->coefficients[1]) << "\n";
    } else {
        std::cout << "  eta: n/a (defined for fermionic two-particle four-mode states)\n";
    }
    if (wootters) {
        std::cout << "  tangle tau: " << fmt_human(wootters->tau) << "\n";
        std::cout << "  Wootters entropy: " << fmt_human(wootters->entropy) << " bits\n";
        std::cout << "  reduced spectrum x: " << fmt_human(wootters->x) << "\n";
    }
    print_tolerances_human(tols);
}

// ---------------------------------------------------------------------------
// perturb

void run_perturb(const std::string& path, const std::string& generator,
                 const std::string& measure, double strength, std::string gen_site,
                 std::string measure_site, const std::string& grid_spec,
                 const std::string& map_name, Format fmt) {
    const LoadedState loaded = load_state_file(path);
    const QuantumState& s = loaded.state;
    const ModeSystem& sys = s.system();
    const auto sites = sys.site_names();
    if (gen_site.empty()) gen_site = sites.front();
    if (measure_site.empty()) measure_site = sites.back();

    OperatorMatrix h = generator == "onsite-u" ? hubbard_onsite(sys, strength, gen_site)
                                               : spinflip_hopping(sys, strength);

    MeasureFn fn;
    if (measure == "site-entropy") {
        fn = [measure_site](const QuantumState& q) {
            return site_entropy_measure(q, measure_site).total_entropy;
        };
    } else if (measure == "eta") {
        fn = [](const QuantumState& q) { return schliemann_eta(q); };
    } else {  // rho-norm: displacement of the site reduction from the input state
        const Eigen::MatrixXcd rho0 =
            partial_trace_site(density_from_state(s), measure_site).matrix();
        fn = [measure_site, rho0](const QuantumState& q) {
            return (partial_trace_site(density_from_state(q), measure_site).matrix() - rho0)
                .norm();
        };
    }

    const std::vector<double> grid = grid_spec.empty() ? kDefaultEpsGrid : parse_grid(grid_spec);
    const EvolutionMap map =
        map_name == "first-order" ? EvolutionMap::FirstOrder : EvolutionMap::Exact;
    const ResponseProbe probe = response_order(fn, h, s, grid, map);

    TolSet tols = state_tols();
    append(tols, density_tols());
    append(tols, {{"w_symmetry", kWSymmetryTol}, {"fit_residual_diagnostic", 0.2}});

    if (fmt == Format::Csv) {
        std::cout << "eps,value\n";
        for (const auto& [eps, value] : probe.samples)
            std::cout << fmt_full(eps) << "," << fmt_full(value) << "\n";
        print_tolerances_csv(tols);
        return;
    }
    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "perturb";
        doc["generator"] = generator;
        doc["generator_site"] = gen_site;
        doc["measure"] = measure;
        doc["measure_site"] = measure_site;
        doc["strength"] = strength;
        doc["evolution_map"] = map_name;
        doc["baseline"] = probe.baseline;
        doc["no_response"] = probe.no_response;
        doc["order"] = probe.order;
        doc["fitted_slope"] = probe.fitted_slope;
        doc["coefficient"] = probe.coefficient;
        doc["fit_residual"] = probe.fit_residual;
        doc["residual_diagnostic"] = probe.residual_diagnostic;
        doc["samples"] = ordered_json::array();
        for (const auto& [eps, value] : probe.samples)
            doc["samples"].push_back({{"eps", eps}, {"value", value}});
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "perturbation response\n";
    std::cout << "  generator: " << generator << " (site " << gen_site << ", strength "
              << fmt_human(strength) << ")\n";
    std::cout << "  measure: " << measure
              << (measure == "eta" ? std::string() : " (site " + measure_site + ")") << "\n";
    std::cout << "  evolution map: " << map_name << "\n";
    std::cout << "  baseline value: " << fmt_human(probe.baseline) << "\n";
    if (probe.no_response) {
        std::cout << "  response: none (measure invariant at every probed epsilon)\n";
    } else {
        std::cout << "  response order: " << probe.order << "\n";
        std::cout << "  fitted slope: " << fmt_human(probe.fitted_slope) << "\n";
        std::cout << "  leading coefficient: " << fmt_human(probe.coefficient) << "\n";
        std::cout << "  fit residual: " << fmt_human(probe.fit_residual)
                  << (probe.residual_diagnostic ? "  (above diagnostic threshold)" : "") << "\n";
    }
    std::cout << "  samples:\n";
    for (const auto& [eps, value] : probe.samples)
        std::cout << "    eps " << fmt_tol(eps) << " -> " << fmt_human(value) << "\n";
    print_tolerances_human(tols);
}

// ---------------------------------------------------------------------------
// bell-curve

void run_bell_curve(const std::string& kind_name, const std::string& stats_name,
                    const std::string& scheme_name, const std::string& grid_spec, Format fmt) {
    const BellKind kind = bell_kind_from_string(kind_name);
    const Statistics stats = statistics_from_string(stats_name);
    const OrthoScheme scheme = ortho_scheme_from_string(scheme_name);
    const std::vector<double> grid = parse_grid(grid_spec);
    const auto curve = eta_vs_overlap_curve(stats, kind, grid, scheme);

    TolSet tols = state_tols();
    append(tols, {{"destroyed_weight", kDestroyedTol}, {"w_symmetry", kWSymmetryTol}});

    if (fmt == Format::Csv) {
        std::cout << "overlap,prenorm,eta,destroyed\n";
        for (const auto& p : curve) {
            std::cout << fmt_full(p.overlap) << "," << fmt_full(p.prenorm) << ",";
            if (p.eta) std::cout << fmt_full(*p.eta);
            std::cout << "," << (p.destroyed ? 1 : 0) << "\n";
        }
        print_tolerances_csv(tols);
        return;
    }
    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "bell-curve";
        doc["kind"] = kind_name;
        doc["statistics"] = stats_name;
        doc["scheme"] = to_string(scheme);
        doc["points"] = ordered_json::array();
        for (const auto& p : curve) {
            ordered_json jp;
            jp["overlap"] = p.overlap;
            jp["prenorm"] = p.prenorm;
            jp["eta"] = p.eta ? ordered_json(*p.eta) : ordered_json(nullptr);
            jp["destroyed"] = p.destroyed;
            doc["points"].push_back(jp);
        }
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "Bell-state overlap curve (" << kind_name << ", " << stats_name << ", "
              << to_string(scheme) << ")\n";
    for (const auto& p : curve) {
        std::cout << "  S = " << fmt_human(p.overlap) << "  prenorm = " << fmt_human(p.prenorm);
        if (p.eta) std::cout << "  eta = " << fmt_human(*p.eta);
        if (p.destroyed) std::cout << "  [destroyed]";
        std::cout << "\n";
    }
    print_tolerances_human(tols);
}

// ---------------------------------------------------------------------------
// omar

void run_omar(double phase, Format fmt) {
    require_not_csv(fmt, "omar");
    const ApparatusRun run = run_apparatus(phase);

    TolSet tols = state_tols();
    append(tols, density_tols());

    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "omar";
        doc["splitter_phase"] = phase;
        doc["side1_input"] = report_json(run.side1_in);
        doc["side1_output"] = report_json(run.side1_out);
        doc["arm1l_input"] = report_json(run.arm1l_in);
        doc["arm1l_output"] = report_json(run.arm1l_out);
        doc["channel_fits"] = ordered_json::array();
        for (const auto& fit : run.channels.fits) {
            ordered_json jf;
            jf["kind"] = to_string(fit.variant.kind);
            jf["p"] = fit.variant.p;
            jf["residual"] = fit.residual;
            jf["residual_at_match_p"] = fit.residual_at_match_p;
            doc["channel_fits"].push_back(jf);
        }
        doc["single_qubit_match_p"] = kSingleQubitMatchP;
        doc["best_channel"] = {{"kind", to_string(run.channels.best.variant.kind)},
                               {"p", run.channels.best.variant.p},
                               {"residual", run.channels.best.residual}};
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "beam-splitter interferometer report (splitter phase " << fmt_human(phase)
              << ")\n";
    std::cout << "S(side 1, input) = " << fmt_human(run.side1_in.total_entropy) << " bits\n";
    std::cout << "S(side 1, output) = " << fmt_human(run.side1_out.total_entropy) << " bits\n";
    std::cout << "side-1 output sectors (arm occupancy profile):\n";
    print_report_human(run.side1_out, "  ");
    std::cout << "S(arm 1L, input) = " << fmt_human(run.arm1l_in.total_entropy) << " bits\n";
    std::cout << "S(arm 1L, output) = " << fmt_human(run.arm1l_out.total_entropy) << " bits\n";
    std::cout << "arm 1L output sectors (occupancy):\n";
    print_report_human(run.arm1l_out, "  ");
    std::cout << "channel fits against the 1L output:\n";
    for (const auto& fit : run.channels.fits)
        std::cout << "  " << to_string(fit.variant.kind) << ": p = " << fmt_human(fit.variant.p)
                  << "  residual = " << fmt_human(fit.residual) << "  residual at p = "
                  << fmt_human(kSingleQubitMatchP) << ": " << fmt_human(fit.residual_at_match_p)
                  << "\n";
    print_tolerances_human(tols);
    std::cout << "best channel p = " << fmt_human(run.channels.best.variant.p) << "\n";
}

// ---------------------------------------------------------------------------
// teleport

std::string bits_string(const std::array<bool, 4>& bits) {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

void run_teleport_sweep(const Eigen::Vector4cd& source, const std::vector<double>& grid,
                        double coupling, Format fmt, const TolSet& tols) {
    const auto sweep = coherent_fidelity_sweep(source, grid, coupling);
    if (fmt == Format::Csv) {
        std::cout << "mean_occupation,cutoff,average_fidelity,overflow_probability\n";
        for (const auto& p : sweep)
            std::cout << fmt_full(p.mean_occupation) << "," << p.cutoff << ","
                      << fmt_full(p.average_fidelity) << "," << fmt_full(p.overflow_probability)
                      << "\n";
        print_tolerances_csv(tols);
        return;
    }
    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "teleport";
        doc["mode"] = "coherent-sweep";
        doc["coupling"] = coupling;
        doc["source"] = ordered_json::array();
        for (int i = 0; i < 4; ++i)
            doc["source"].push_back({{"re", source(i).real()}, {"im", source(i).imag()}});
        doc["points"] = ordered_json::array();
        for (const auto& p : sweep)
            doc["points"].push_back({{"mean_occupation", p.mean_occupation},
                                     {"cutoff", p.cutoff},
                                     {"average_fidelity", p.average_fidelity},
                                     {"overflow_probability", p.overflow_probability}});
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::cout << "coherent teleportation sweep (coupling " << fmt_human(coupling) << ")\n";
    std::cout << "  source: ";
    for (int i = 0; i < 4; ++i) std::cout << (i ? ", " : "") << fmt_human_cplx(source(i));
    std::cout << "\n";
    for (const auto& p : sweep)
        std::cout << "  |alpha|^2 = " << fmt_human(p.mean_occupation) << "  cutoff = " << p.cutoff
                  << "  average fidelity = " << fmt_human(p.average_fidelity)
                  << "  overflow = " << fmt_human(p.overflow_probability) << "\n";
    print_tolerances_human(tols);
}

void run_teleport(const std::string& source_spec, const std::string& mode_name,
                  bool mode_explicit, std::string stats_name, double mean_occupation,
                  std::optional<int> cutoff, double coupling,
                  const std::string& alpha_grid_spec, bool flip_occupation_role,
                  bool flip_qubit_order, Format fmt) {
    const Eigen::Vector4cd source = parse_source(source_spec);
    const bool sweep_requested = !alpha_grid_spec.empty();
    if (sweep_requested && mode_explicit && mode_name == "ideal")
        throw UsageError("alpha grid applies to coherent mode only");
    const bool coherent = sweep_requested || mode_name == "coherent";
    if (stats_name.empty()) stats_name = coherent ? "boson" : "fermion";

    TolSet tols = state_tols();
    append(tols, {{"source_norm", kSourceNormTol},
                  {"correction_unitarity", kCorrectionUnitarityTol},
                  {"coherent_tail", kCoherentTailTol}});

    IsomorphismOrientation orientation;
    orientation.occupied_is_one = !flip_occupation_role;
    orientation.up_is_first = !flip_qubit_order;

    if (sweep_requested) {
        run_teleport_sweep(source, parse_grid(alpha_grid_spec), coupling, fmt, tols);
        return;
    }
    require_not_csv(fmt, "teleport without --alpha-grid");

    TeleportOptions opts;
    opts.statistics = statistics_from_string(stats_name);
    opts.mode = coherent ? TeleportMode::Coherent : TeleportMode::Ideal;
    opts.alpha = Cplx(std::sqrt(mean_occupation), 0.0);
    opts.cutoff = cutoff;
    opts.coupling = coupling;
    opts.orientation = orientation;

    std::optional<CoherentSource> sink;
    if (coherent) sink = make_coherent_source(opts.alpha, opts.cutoff);

    const ProtocolResult res = run_protocol(source, opts);

    if (fmt == Format::Structured) {
        ordered_json doc;
        doc["command"] = "teleport";
        doc["mode"] = coherent ? "coherent" : "ideal";
        doc["statistics"] = stats_name;
        doc["source"] = ordered_json::array();
        for (int i = 0; i < 4; ++i)
            doc["source"].push_back({{"re", source(i).real()}, {"im", source(i).imag()}});
        if (coherent) {
            doc["mean_occupation"] = mean_occupation;
            doc["cutoff"] = sink->cutoff;
            doc["tail_probability"] = sink->tail_probability;
            doc["residual"] = sink->residual;
            doc["residual_bound"] = sink->residual_bound;
            doc["coupling"] = coupling;
        }
        doc["orientation"] = {{"occupied_is_one", orientation.occupied_is_one},
                              {"up_is_first", orientation.up_is_first}};
        doc["correction_unitarity_defect"] = res.correction_unitarity_defect;
        doc["classical_bits"] = bits_string(res.classical_bits);
        doc["fidelity"] = res.fidelity;
        doc["average_fidelity"] = res.average_fidelity;
        doc["overflow_probability"] = res.overflow_probability;
        doc["branches"] = ordered_json::array();
        for (const auto& br : res.branches)
            doc["branches"].push_back({{"bits", bits_string(br.bits)},
                                       {"probability", br.probability},
                                       {"fidelity", br.fidelity}});
        ordered_json re = ordered_json::array(), im = ordered_json::array();
        for (int r = 0; r < 4; ++r) {
            ordered_json rr = ordered_json::array(), ri = ordered_json::array();
            for (int c = 0; c < 4; ++c) {
                rr.push_back(res.output(r, c).real());
                ri.push_back(res.output(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        doc["output_re"] = re;
        doc["output_im"] = im;
        doc["tolerances"] = tolerances_json(tols);
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "teleportation report\n";
    std::cout << "  mode: " << (coherent ? "coherent" : "ideal") << "  statistics: " << stats_name
              << "\n";
    std::cout << "  source: ";
    for (int i = 0; i < 4; ++i) std::cout << (i ? ", " : "") << fmt_human_cplx(source(i));
    std::cout << "\n";
    if (coherent) {
        std::cout << "  |alpha|^2 = " << fmt_human(mean_occupation) << "  cutoff = "
                  << sink->cutoff << "  coupling = " << fmt_human(coupling) << "\n";
        std::cout << "  sink tail probability = " << fmt_tol(sink->tail_probability)
                  << "  residual = " << fmt_tol(sink->residual) << " (bound "
                  << fmt_tol(sink->residual_bound) << ")\n";
    }
    std::cout << "  correction unitarity defect: " << fmt_tol(res.correction_unitarity_defect)
              << "\n";
    std::cout << "  representative branch " << bits_string(res.classical_bits)
              << ": fidelity = " << fmt_human(res.fidelity) << "\n";
    std::cout << "  branches (bits = source-1, source-2, A up, A dn):\n";
    for (const auto& br : res.branches)
        std::cout << "    " << bits_string(br.bits) << "  p = " << fmt_human(br.probability)
                  << "  fidelity = " << fmt_human(br.fidelity) << "\n";
    std::cout << "  average fidelity: " << fmt_human(res.average_fidelity) << "\n";
    std::cout << "  overflow probability: " << fmt_tol(res.overflow_probability) << "\n";
    print_tolerances_human(tols);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fockent: entanglement measures and experiments for small "
                 "systems of indistinguishable particles"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    const auto format_check = CLI::IsMember({"human", "structured", "csv"});

    // state-info
    auto* si = app.add_subcommand("state-info", "Describe a state file");
    std::string si_path, si_save, si_format = "human";
    si->add_option("--state", si_path, "state file path")->required();
    si->add_option("--save", si_save,
                   "also write the normalized state, in canonical mode order, to this path");
    si->add_option("--format", si_format, "human|structured")->check(format_check);

    // measure
    auto* me = app.add_subcommand("measure", "Entanglement measures of a state file");
    std::string me_path, me_site, me_format = "human";
    me->add_option("--state", me_path, "state file path")->required();
    me->add_option("--site", me_site, "site to reduce to (default: last site)");
    me->add_option("--format", me_format, "human|structured")->check(format_check);

    // perturb
    auto* pe = app.add_subcommand("perturb", "Leading response order of a measure");
    std::string pe_path, pe_gen = "onsite-u", pe_measure = "site-entropy";
    std::string pe_gen_site, pe_measure_site, pe_grid, pe_map = "exact", pe_format = "human";
    double pe_strength = 1.0;
    pe->add_option("--state", pe_path, "state file path")->required();
    pe->add_option("--generator", pe_gen, "onsite-u|spin-flip-hopping")
        ->check(CLI::IsMember({"onsite-u", "spin-flip-hopping"}));
    pe->add_option("--measure", pe_measure,
                   "site-entropy|eta|rho-norm (rho-norm tracks the Frobenius displacement of "
                   "the reduced site matrix from its unperturbed value)")
        ->check(CLI::IsMember({"site-entropy", "eta", "rho-norm"}));
    pe->add_option("--strength", pe_strength, "generator strength (U or t)");
    pe->add_option("--generator-site", pe_gen_site, "site for onsite-u (default: first site)");
    pe->add_option("--measure-site", pe_measure_site, "site to reduce to (default: last site)");
    pe->add_option("--eps-grid", pe_grid, "start:end:count (default: 1e-2, 1e-3, 1e-4)");
    pe->add_option("--map", pe_map, "exact|first-order")
        ->check(CLI::IsMember({"exact", "first-order"}));
    pe->add_option("--format", pe_format, "human|structured|csv")->check(format_check);

    // bell-curve
    auto* bc = app.add_subcommand("bell-curve", "Measures of Bell states vs orbital overlap");
    std::string bc_kind = "psi-minus", bc_stats = "fermion", bc_scheme = "loewdin";
    std::string bc_grid = "0:0.95:20", bc_format = "csv";
    bc->add_option("--kind", bc_kind, "psi-plus|psi-minus|phi-plus|phi-minus")
        ->check(CLI::IsMember({"psi-plus", "psi-minus", "phi-plus", "phi-minus"}));
    bc->add_option("--statistics", bc_stats, "fermion|boson")
        ->check(CLI::IsMember({"fermion", "boson"}));
    bc->add_option("--scheme", bc_scheme, "loewdin|gram-schmidt")
        ->check(CLI::IsMember({"loewdin", "gram-schmidt"}));
    bc->add_option("--grid", bc_grid, "overlap grid start:end:count");
    bc->add_option("--format", bc_format, "human|structured|csv")->check(format_check);

    // omar
    auto* om = app.add_subcommand("omar", "Beam-splitter spin-to-space entanglement transfer");
    std::string om_format = "human";
    double om_phase = 0.0;
    om->add_option("--phase", om_phase, "beam-splitter phase");
    om->add_option("--format", om_format, "human|structured")->check(format_check);

    // teleport
    auto* te = app.add_subcommand("teleport", "Occupation-basis two-qubit teleportation");
    std::string te_source = "0.5,0.5,0.5,0.5", te_mode = "ideal", te_stats;
    std::string te_alpha_grid, te_format = "human";
    double te_mean = 4.0, te_coupling = 1.0;
    int te_cutoff = -1;
    te->add_option("--source", te_source, "four complex amplitudes a,b,c,d");
    te->add_option("--mode", te_mode, "ideal|coherent")
        ->check(CLI::IsMember({"ideal", "coherent"}));
    te->add_option("--statistics", te_stats, "fermion|boson (default: by mode)")
        ->check(CLI::IsMember({"fermion", "boson"}));
    te->add_option("--mean-occupation", te_mean, "coherent sink |alpha|^2");
    te->add_option("--cutoff", te_cutoff, "sink occupation cutoff (default: tail rule)");
    te->add_option("--coupling", te_coupling, "exchange coupling g");
    te->add_option("--alpha-grid", te_alpha_grid,
                   "sweep |alpha|^2 over start:end:count (implies coherent mode)");
    te->add_flag("--flip-occupation-role", "read occupied modes as qubit 0");
    te->add_flag("--flip-qubit-order", "map spin-down to the first virtual qubit");
    te->add_option("--format", te_format, "human|structured|csv (csv: sweep only)")
        ->check(format_check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (si->parsed()) {
            run_state_info(si_path, si_save, format_from_string(si_format));
        } else if (me->parsed()) {
            run_measure(me_path, me_site, format_from_string(me_format));
        } else if (pe->parsed()) {
            run_perturb(pe_path, pe_gen, pe_measure, pe_strength, pe_gen_site, pe_measure_site,
                        pe_grid, pe_map, format_from_string(pe_format));
        } else if (bc->parsed()) {
            run_bell_curve(bc_kind, bc_stats, bc_scheme, bc_grid, format_from_string(bc_format));
        } else if (om->parsed()) {
            run_omar(om_phase, format_from_string(om_format));
        } else if (te->parsed()) {
            run_teleport(te_source, te_mode, te->count("--mode") > 0, te_stats, te_mean,
                         te_cutoff >= 0 ? std::optional<int>(te_cutoff) : std::nullopt,
                         te_coupling, te_alpha_grid, te->count("--flip-occupation-role") > 0,
                         te->count("--flip-qubit-order") > 0, format_from_string(te_format));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
