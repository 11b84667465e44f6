#pragma once

// Machine-readable outputs with pinned formatting: every float is written as
// %.16e (17 significant digits, lowercase e), so identical inputs produce
// byte-identical files.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heff/averaging.hpp"
#include "heff/effective.hpp"
#include "heff/model.hpp"

namespace heff {

// %.16e rendering used by every JSON/CSV writer.
std::string format_float(double value);

// FNV-1a 64-bit hex digest (input identification in reports).
std::string fnv1a_digest(const std::string& bytes);

// heff.json: space factors + grouped term table (freq ascending, matrices
// row-major as [re, im] pairs).
void write_heff_json(std::ostream& os, const EffectiveHamiltonian& e, const std::string& name);
void write_heff_json_file(const std::string& path, const EffectiveHamiltonian& e,
                          const std::string& name);
EffectiveHamiltonian read_heff_json_file(const std::string& path);

// CSV: '.' decimal, ',' separator, '\n' line endings, mandatory header.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Basis labels for population columns: qudit levels are 1-based (|1>, |2>,
// ...), Fock levels 0-based, factors joined by '_'.
std::vector<std::string> basis_labels(const HilbertSpace& space);

struct RunReport {
    std::string name;
    std::string input_digest;
    struct TermRow {
        double freq;
        double coeff_norm;
    };
    std::vector<TermRow> term_table;
    std::optional<BandwidthReport> bandwidth;
    std::optional<KernelFeasibility> feasibility;
    std::vector<std::string> warnings;
    std::vector<std::string> check_lines;  // "PASS ..." / "FAIL ..." entries
    bool all_passed = true;

    void add_check(bool pass, const std::string& text);
    void print(std::ostream& os) const;
};

}  // namespace heff
