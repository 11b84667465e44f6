#include "heff/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace heff {

std::string format_float(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", value);
    return buf;
}

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_heff_json(std::ostream& os, const EffectiveHamiltonian& e, const std::string& name) {
    os << "{\n";
    os << "  \"name\": \"" << name << "\",\n";
    os << "  \"space\": [";
    for (int f = 0; f < e.space().factor_count(); ++f) {
        const Factor& fac = e.space().factor(f);
        if (f > 0) os << ", ";
        os << "{\"kind\": \"" << (fac.kind == FactorKind::Qudit ? "qudit" : "boson")
           << "\", \"dim\": " << fac.dim << "}";
    }
    os << "],\n";
    os << "  \"freq_tol\": " << format_float(e.freq_tol()) << ",\n";
    os << "  \"terms\": [";
    const auto terms = e.terms();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k > 0) os << ",";
        os << "\n    {\"freq\": " << format_float(terms[k].freq) << ", \"matrix\": [";
        const Matrix& m = terms[k].coeff.matrix();
        for (int i = 0; i < m.rows(); ++i) {
            if (i > 0) os << ",";
            os << "\n      [";
            for (int j = 0; j < m.cols(); ++j) {
                if (j > 0) os << ", ";
                os << "[" << format_float(m(i, j).real()) << ", " << format_float(m(i, j).imag())
                   << "]";
            }
            os << "]";
        }
        os << "\n    ]}";
    }
    os << "\n  ]\n}\n";
}

void write_heff_json_file(const std::string& path, const EffectiveHamiltonian& e,
                          const std::string& name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_heff_json(out, e, name);
}

EffectiveHamiltonian read_heff_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    try {
        std::vector<Factor> factors;
        for (const auto& f : j.at("space")) {
            const std::string kind = f.at("kind").get<std::string>();
            factors.push_back({kind == "boson" ? FactorKind::Boson : FactorKind::Qudit,
                               f.at("dim").get<int>()});
        }
        HilbertSpace space(std::move(factors));
        std::vector<EffectiveTerm> terms;
        for (const auto& t : j.at("terms")) {
            Matrix m(space.dim(), space.dim());
            const auto& rows = t.at("matrix");
            for (int i = 0; i < space.dim(); ++i) {
                for (int k = 0; k < space.dim(); ++k) {
                    const auto& entry = rows.at(i).at(k);
                    m(i, k) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
                }
            }
            terms.push_back({Operator(space, std::move(m)), t.at("freq").get<double>()});
        }
        return EffectiveHamiltonian(space, std::move(terms), j.at("freq_tol").get<double>());
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) os << ",";
        os << header[i];
    }
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) os << ",";
            os << format_float(row[i]);
        }
        os << "\n";
    }
}

std::vector<std::string> basis_labels(const HilbertSpace& space) {
    std::vector<std::string> labels(static_cast<std::size_t>(space.dim()));
    for (int idx = 0; idx < space.dim(); ++idx) {
        int rest = idx;
        std::vector<int> digits(static_cast<std::size_t>(space.factor_count()));
        for (int f = space.factor_count() - 1; f >= 0; --f) {
            digits[static_cast<std::size_t>(f)] = rest % space.factor(f).dim;
            rest /= space.factor(f).dim;
        }
        std::ostringstream label;
        for (int f = 0; f < space.factor_count(); ++f) {
            if (f > 0) label << "_";
            const int offset = space.factor(f).kind == FactorKind::Qudit ? 1 : 0;
            label << digits[static_cast<std::size_t>(f)] + offset;
        }
        labels[static_cast<std::size_t>(idx)] = label.str();
    }
    return labels;
}

void RunReport::add_check(bool pass, const std::string& text) {
    check_lines.push_back(std::string(pass ? "PASS " : "FAIL ") + text);
    all_passed = all_passed && pass;
}

void RunReport::print(std::ostream& os) const {
    os << "== " << name << " (input " << input_digest << ") ==\n";
    if (bandwidth) {
        os << "bandwidth: spread " << format_float(bandwidth->spread) << ", floor "
           << format_float(bandwidth->floor_omega) << ", ratio " << format_float(bandwidth->ratio)
           << (bandwidth->ok ? "" : "  [narrow-band assumption strained]") << "\n";
    }
    if (feasibility) {
        os << "kernel: max fhat(carrier) " << format_float(feasibility->max_carrier_transfer)
           << ", max fhat(sum) " << format_float(feasibility->max_sum_transfer)
           << ", min fhat(beat) " << format_float(feasibility->min_beat_transfer)
           << (feasibility->ok ? "" : "  [infeasible]") << "\n";
    }
    os << "effective terms:\n";
    for (const auto& row : term_table) {
        os << "  freq " << format_float(row.freq) << "  |coeff|_F " << format_float(row.coeff_norm)
           << "\n";
    }
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    for (const auto& line : check_lines) os << line << "\n";
}

}  // namespace heff
