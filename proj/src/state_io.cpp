#include "fockent/state_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fockent {

namespace {

using nlohmann::ordered_json;

ModeLabel mode_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("site"))
        throw std::invalid_argument("state file: each mode needs at least a site");
    ModeLabel m;
    m.site = j.at("site").get<std::string>();
    m.spin = spin_from_string(j.value("spin", std::string("none")));
    m.arm = j.value("arm", std::string());
    return m;
}

ordered_json mode_to_json(const ModeLabel& m) {
    ordered_json j;
    j["site"] = m.site;
    j["spin"] = to_string(m.spin);
    if (!m.arm.empty()) j["arm"] = m.arm;
    return j;
}

}  // namespace

LoadedState parse_state_text(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("state file: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("state file: top level must be an object");
    for (const auto& field : {"statistics", "modes", "terms"})
        if (!doc.contains(field))
            throw std::invalid_argument(std::string("state file: missing field ") + field);

    const Statistics stats = statistics_from_string(doc.at("statistics").get<std::string>());
    if (stats == Statistics::Fermion && doc.contains("nmax"))
        throw std::invalid_argument("state file: nmax applies to bosonic files only");

    std::vector<ModeLabel> file_modes;
    for (const auto& jm : doc.at("modes")) file_modes.push_back(mode_from_json(jm));

    const int nmax = stats == Statistics::Boson
                         ? doc.value("nmax", ModeSystem::kDefaultNmax)
                         : 1;
    const ModeSystem sys(stats, file_modes, nmax);

    QuantumState::AmplitudeMap amps;
    for (const auto& jt : doc.at("terms")) {
        if (!jt.is_object() || !jt.contains("occupations"))
            throw std::invalid_argument("state file: each term needs an occupations list");
        const auto& occ = jt.at("occupations");
        if (occ.size() != file_modes.size())
            throw std::invalid_argument(
                "state file: occupations length does not match the mode list");
        OccupationPattern p(sys.size(), 0);
        for (std::size_t j = 0; j < file_modes.size(); ++j) {
            const int n = occ.at(j).get<int>();
            if (n < 0) throw std::invalid_argument("state file: negative occupation");
            // Occupations are listed in the document's mode order; map them
            // onto the canonical order of the constructed system.
            p[sys.index_of(file_modes[j])] = static_cast<std::uint8_t>(n);
        }
        amps[p] += Cplx(jt.value("re", 0.0), jt.value("im", 0.0));
    }

    const QuantumState raw = QuantumState::with_terms(sys, amps);
    const NormalizedState n = raw.normalized();
    return {n.state, n.original_norm};
}

LoadedState load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state_text(buf.str());
}

std::string state_to_text(const QuantumState& s) {
    const ModeSystem& sys = s.system();
    ordered_json doc;
    doc["statistics"] = to_string(sys.statistics());
    doc["modes"] = ordered_json::array();
    for (const auto& m : sys.modes()) doc["modes"].push_back(mode_to_json(m));
    if (sys.statistics() == Statistics::Boson) doc["nmax"] = sys.nmax();
    doc["terms"] = ordered_json::array();
    for (const auto& [pat, amp] : s.amplitudes()) {
        ordered_json jt;
        jt["occupations"] = ordered_json::array();
        for (auto n : pat) jt["occupations"].push_back(static_cast<int>(n));
        jt["re"] = amp.real();
        jt["im"] = amp.imag();
        doc["terms"].push_back(jt);
    }
    return doc.dump(2) + "\n";
}

void save_state_file(const QuantumState& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write state file: " + path);
    out << state_to_text(s);
}

}  // namespace fockent
