#include "heff/modelfile.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace heff {

namespace {

using json = nlohmann::ordered_json;

// --- tiny recursive-descent parser for operator expressions ------------------

class ExprParser {
public:
    ExprParser(const std::string& text, const HilbertSpace& space,
               const std::map<std::string, Operator>& named,
               const std::map<std::string, double>& params)
        : text_(text), space_(space), named_(named), params_(params) {}

    Operator parse() {
        Operator op = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters after expression");
        return op;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        std::ostringstream msg;
        msg << "operator expression '" << text_ << "' at offset " << pos_ << ": " << why;
        throw ParseError(msg.str());
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) fail("expected identifier");
        return text_.substr(start, pos_ - start);
    }

    double number() {
        skip_ws();
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(text_.substr(pos_), &consumed);
        } catch (const std::exception&) {
            fail("expected number");
        }
        pos_ += consumed;
        return value;
    }

    // scalar := [re, im] | real-literal | param-name
    Complex scalar() {
        skip_ws();
        if (consume('[')) {
            const double re = number();
            expect(',');
            const double im = number();
            expect(']');
            return {re, im};
        }
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' ||
             text_[pos_] == '+' || text_[pos_] == '.')) {
            return {number(), 0.0};
        }
        const std::string name = identifier();
        auto it = params_.find(name);
        if (it == params_.end()) fail("unknown scalar parameter '" + name + "'");
        return {it->second, 0.0};
    }

    int integer() {
        const double v = number();
        const int i = static_cast<int>(std::lround(v));
        if (std::abs(v - i) > 1e-9) fail("expected integer");
        return i;
    }

    std::vector<int> integer_list() {
        std::vector<int> out{integer()};
        while (consume(',')) out.push_back(integer());
        return out;
    }

    Operator expression() {
        const std::string name = identifier();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '(') {
            auto it = named_.find(name);
            if (it == named_.end()) fail("unknown operator name '" + name + "'");
            return it->second;
        }
        expect('(');
        Operator result = call(name);
        expect(')');
        return result;
    }

    Operator call(const std::string& fn) {
        if (fn == "scale") {
            const Complex c = scalar();
            expect(',');
            return c * expression();
        }
        if (fn == "mul") {
            Operator a = expression();
            expect(',');
            return a * expression();
        }
        if (fn == "add") {
            Operator a = expression();
            expect(',');
            return a + expression();
        }
        if (fn == "adjoint") return expression().adjoint();
        if (fn == "ketbra") {
            const int f = integer();
            expect(',');
            const int i = integer();
            expect(',');
            const int j = integer();
            return ketbra(space_, f, i, j);
        }
        if (fn == "lower") return ladder(space_, integer(), LadderKind::Lower);
        if (fn == "raise") return ladder(space_, integer(), LadderKind::Raise);
        if (fn == "jx") return collective_spin(space_, integer_list(), SpinAxis::X);
        if (fn == "jy") return collective_spin(space_, integer_list(), SpinAxis::Y);
        if (fn == "jplus") return collective_spin(space_, integer_list(), SpinAxis::Plus);
        fail("unknown function '" + fn + "'");
    }

    const std::string& text_;
    const HilbertSpace& space_;
    const std::map<std::string, Operator>& named_;
    const std::map<std::string, double>& params_;
    std::size_t pos_ = 0;
};

double scalar_or_param(const json& j, const std::map<std::string, double>& params,
                       const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto it = params.find(j.get<std::string>());
        if (it == params.end()) {
            throw ParseError(field + ": unknown parameter '" + j.get<std::string>() + "'");
        }
        return it->second;
    }
    throw ParseError(field + ": expected number or parameter name");
}

Operator explicit_matrix(const json& rows, const HilbertSpace& space, const std::string& name) {
    const int d = space.dim();
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
        std::ostringstream msg;
        msg << "operators." << name << ": explicit matrix must be " << d << "x" << d;
        throw ParseError(msg.str());
    }
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
            std::ostringstream msg;
            msg << "operators." << name << ": row " << i << " must have " << d << " entries";
            throw ParseError(msg.str());
        }
        for (int j = 0; j < d; ++j) {
            const auto& entry = row.at(static_cast<std::size_t>(j));
            if (!entry.is_array() || entry.size() != 2) {
                std::ostringstream msg;
                msg << "operators." << name << ": entry (" << i << ", " << j
                    << ") must be an [re, im] pair";
                throw ParseError(msg.str());
            }
            m(i, j) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return Operator(space, std::move(m));
}

}  // namespace

Operator parse_operator_expr(const std::string& expr, const HilbertSpace& space,
                             const std::map<std::string, Operator>& named,
                             const std::map<std::string, double>& params) {
    return ExprParser(expr, space, named, params).parse();
}

ModelFile load_model_file(const std::string& path,
                          const std::map<std::string, double>& param_overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open model file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }

    try {
        // space
        if (!j.contains("space")) throw ParseError(path + ": missing 'space'");
        std::vector<Factor> factors;
        for (const auto& f : j.at("space")) {
            const std::string kind = f.at("kind").get<std::string>();
            if (kind != "qudit" && kind != "boson") {
                throw ParseError(path + ": space factor kind must be 'qudit' or 'boson'");
            }
            factors.push_back(
                {kind == "boson" ? FactorKind::Boson : FactorKind::Qudit, f.at("dim").get<int>()});
        }
        HilbertSpace space(std::move(factors));

        // params (+ overrides; overriding an undeclared name is a parse error)
        std::map<std::string, double> params;
        if (j.contains("params")) {
            for (const auto& [key, value] : j.at("params").items()) {
                params[key] = value.get<double>();
            }
        }
        for (const auto& [key, value] : param_overrides) {
            if (params.find(key) == params.end()) {
                throw ParseError(path + ": override for undeclared parameter '" + key + "'");
            }
            params[key] = value;
        }

        // operators (later definitions may reference earlier ones)
        std::map<std::string, Operator> operators;
        if (j.contains("operators")) {
            for (const auto& [name, def] : j.at("operators").items()) {
                if (def.is_string()) {
                    operators.emplace(
                        name, parse_operator_expr(def.get<std::string>(), space, operators, params));
                } else {
                    operators.emplace(name, explicit_matrix(def, space, name));
                }
            }
        }

        // terms
        if (!j.contains("terms")) throw ParseError(path + ": missing 'terms'");
        std::vector<HarmonicTerm> terms;
        for (const auto& t : j.at("terms")) {
            const std::string expr = t.at("op").get<std::string>();
            const Operator op = parse_operator_expr(expr, space, operators, params);
            const double omega = scalar_or_param(t.at("omega"), params, path + ": terms.omega");
            terms.push_back(normalize_term(op, omega));
        }
        InteractionHamiltonian interaction(space, std::move(terms));

        ModelFile model{j.value("name", std::string("model")),
                        std::move(params),
                        space,
                        std::move(operators),
                        std::move(interaction)};

        if (j.contains("simulation")) {
            const auto& sim = j.at("simulation");
            model.t0 = sim.value("t0", 0.0);
            if (sim.contains("t1")) model.t1 = scalar_or_param(sim.at("t1"), model.params, "t1");
            if (sim.contains("dt")) model.dt = scalar_or_param(sim.at("dt"), model.params, "dt");
            model.store_every = sim.value("store_every", 1);
            model.burn_in = sim.value("burn_in", 0.0);
            if (sim.contains("psi0") && sim.at("psi0").is_array()) {
                const auto& vec = sim.at("psi0");
                model.psi0 = Eigen::VectorXcd::Zero(space.dim());
                if (static_cast<int>(vec.size()) != space.dim()) {
                    throw ParseError(path + ": simulation.psi0 length must equal the space dim");
                }
                for (int i = 0; i < space.dim(); ++i) {
                    const auto& entry = vec.at(static_cast<std::size_t>(i));
                    model.psi0(i) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
                }
                const double norm = model.psi0.norm();
                if (norm <= 0.0) throw ParseError(path + ": simulation.psi0 must be nonzero");
                model.psi0 /= norm;
            } else if (sim.contains("psi0")) {
                const int idx = sim.at("psi0").get<int>();
                if (idx < 0 || idx >= space.dim()) {
                    throw ParseError(path + ": simulation.psi0 index out of range");
                }
                model.psi0 = Eigen::VectorXcd::Zero(space.dim());
                model.psi0(idx) = 1.0;
            }
        }
        if (model.psi0.size() == 0) {
            model.psi0 = Eigen::VectorXcd::Zero(space.dim());
            model.psi0(0) = 1.0;
        }
        if (model.dt == 0.0) {
            model.dt = 0.05 / model.interaction.omega_max();
        }

        if (j.contains("kernel")) {
            const auto& tau = j.at("kernel").at("tau");
            if (tau.is_string()) {
                if (tau.get<std::string>() != "auto") {
                    throw ParseError(path + ": kernel.tau must be a number or \"auto\"");
                }
                model.kernel_auto = true;
            } else {
                model.kernel_auto = false;
                model.kernel_tau = tau.get<double>();
            }
        }
        if (j.contains("secular_cutoff")) {
            const auto& cut = j.at("secular_cutoff");
            if (cut.is_string()) {
                if (cut.get<std::string>() != "off") {
                    throw ParseError(path + ": secular_cutoff must be a number or \"off\"");
                }
            } else {
                model.secular_cutoff = cut.get<double>();
            }
        }
        return model;
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

}  // namespace heff
