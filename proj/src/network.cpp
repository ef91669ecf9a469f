#include "pstsim/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pstsim {

namespace {

bool valid_label(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
              c == '+' || c == '-'))
            return false;
    }
    return true;
}

double parse_number(const std::string& tok, int line) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + tok + "'", line);
    }
    if (pos != tok.size() || !std::isfinite(v))
        throw ParseError("expected a finite number, got '" + tok + "'", line);
    return v;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SpinNetwork SpinNetwork::create(std::vector<std::string> labels,
                                std::vector<double> shifts_hz,
                                std::vector<Coupling> couplings) {
    const int n = static_cast<int>(labels.size());
    if (n < 2) throw ValidationError("a network needs at least 2 sites");
    if (shifts_hz.size() != labels.size())
        throw ValidationError("labels/shifts size mismatch");
    for (int i = 0; i < n; ++i) {
        if (!valid_label(labels[i]))
            throw ValidationError("invalid site label '" + labels[i] + "'");
        for (int j = i + 1; j < n; ++j)
            if (labels[i] == labels[j])
                throw ValidationError("duplicate site label '" + labels[i] + "'");
        if (!std::isfinite(shifts_hz[i]))
            throw ValidationError("non-finite shift for site '" + labels[i] + "'");
    }

    for (auto& c : couplings) {
        if (c.i == c.j)
            throw ValidationError("self-coupling declared for site '" +
                                  (c.i >= 0 && c.i < n ? labels[c.i] : std::to_string(c.i)) + "'");
        if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n)
            throw ValidationError("coupling references site index out of range");
        if (c.i > c.j) std::swap(c.i, c.j);
        if (!std::isfinite(c.j_hz) || c.j_hz == 0.0)
            throw ValidationError("coupling (" + labels[c.i] + "," + labels[c.j] +
                                  ") must have a nonzero finite J");
    }
    std::sort(couplings.begin(), couplings.end(),
              [](const Coupling& a, const Coupling& b) {
                  return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
    for (std::size_t k = 1; k < couplings.size(); ++k)
        if (couplings[k - 1].i == couplings[k].i && couplings[k - 1].j == couplings[k].j)
            throw ValidationError("pair (" + labels[couplings[k].i] + "," +
                                  labels[couplings[k].j] + ") declared more than once");

    SpinNetwork net;
    net.labels_ = std::move(labels);
    net.shifts_hz_ = std::move(shifts_hz);
    net.couplings_ = std::move(couplings);
    return net;
}

double SpinNetwork::shift_hz(int i) const {
    if (i < 0 || i >= num_sites())
        throw ValidationError("site index " + std::to_string(i) + " out of range");
    return shifts_hz_[i];
}

bool SpinNetwork::coupled(int i, int j) const { return coupling_hz(i, j) != 0.0; }

double SpinNetwork::coupling_hz(int i, int j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    for (const auto& c : couplings_)
        if (c.i == i && c.j == j) return c.j_hz;
    return 0.0;
}

double SpinNetwork::shift_difference(int i, int j) const {
    if (i == j)
        throw ValidationError("shift difference requires two distinct sites");
    return std::abs(shift_angular(i) - shift_angular(j));
}

int SpinNetwork::find_site(const std::string& label) const {
    for (int i = 0; i < num_sites(); ++i)
        if (labels_[i] == label) return i;
    return -1;
}

SpinNetwork load_network(const std::string& config_text) {
    enum class Section { None, Sites, Couplings };
    Section section = Section::None;

    std::vector<std::string> labels;
    std::vector<double> shifts;
    struct RawCoupling {
        std::string a, b;
        double j;
        int line;
    };
    std::vector<RawCoupling> raw;

    std::istringstream is(config_text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (toks[0] == "[sites]" || toks[0] == "[couplings]") {
            if (toks.size() != 1)
                throw ParseError("unexpected tokens after section header", lineno);
            section = toks[0] == "[sites]" ? Section::Sites : Section::Couplings;
            continue;
        }
        switch (section) {
        case Section::None:
            throw ParseError("content before any [sites]/[couplings] section", lineno);
        case Section::Sites: {
            if (toks.size() != 2)
                throw ParseError("expected 'NAME SHIFT_HZ'", lineno);
            if (!valid_label(toks[0]))
                throw ParseError("invalid site label '" + toks[0] + "'", lineno);
            labels.push_back(toks[0]);
            shifts.push_back(parse_number(toks[1], lineno));
            break;
        }
        case Section::Couplings: {
            if (toks.size() != 3)
                throw ParseError("expected 'NAME_I NAME_J J_HZ'", lineno);
            raw.push_back({toks[0], toks[1], parse_number(toks[2], lineno), lineno});
            break;
        }
        }
    }

    std::vector<Coupling> couplings;
    couplings.reserve(raw.size());
    for (const auto& rc : raw) {
        int a = -1, b = -1;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
            if (labels[i] == rc.a) a = i;
            if (labels[i] == rc.b) b = i;
        }
        if (a < 0) throw ParseError("coupling references unknown site '" + rc.a + "'", rc.line);
        if (b < 0) throw ParseError("coupling references unknown site '" + rc.b + "'", rc.line);
        couplings.push_back({a, b, rc.j});
    }
    return SpinNetwork::create(std::move(labels), std::move(shifts), std::move(couplings));
}

SpinNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_network(ss.str());
}

std::string serialize(const SpinNetwork& net) {
    std::ostringstream os;
    os << "[sites]\n";
    for (int i = 0; i < net.num_sites(); ++i)
        os << net.label(i) << " " << fmt_double(net.shift_hz(i)) << "\n";
    os << "[couplings]\n";
    for (const auto& c : net.couplings())
        os << net.label(c.i) << " " << net.label(c.j) << " " << fmt_double(c.j_hz) << "\n";
    return os.str();
}

} // namespace pstsim
