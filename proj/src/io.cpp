#include "ddpole/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ddpole::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) {
        out.push_back(field);
    }
    return out;
}

double parse_double(const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_input, "malformed numeric field: '" + s + "'");
    }
}

json complex_to_json(Complex c) {
    return json{{"re", c.real()}, {"im", c.imag()}};
}

Complex complex_from_json(const json& j) {
    if (j.is_number()) {
        return Complex(j.get<double>(), 0.0);
    }
    if (!j.is_object() || !j.contains("re")) {
        throw Error(ErrorKind::invalid_input, "expected {\"re\":..,\"im\":..} complex value");
    }
    return Complex(j.at("re").get<double>(), j.value("im", 0.0));
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    traj.validate();
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::invalid_input, "cannot open for writing: " + path);
    }
    const Index m = traj.input_dim();
    const Index n = traj.state_dim();
    out << "t";
    for (Index i = 0; i < m; ++i) {
        out << ",u_" << (i + 1);
    }
    for (Index i = 0; i < n; ++i) {
        out << ",x_" << (i + 1);
    }
    out << "\n";
    for (Index t = 0; t < traj.length(); ++t) {
        out << t;
        for (Index i = 0; i < m; ++i) {
            out << "," << format_double(traj.inputs(i, t));
        }
        for (Index i = 0; i < n; ++i) {
            out << "," << format_double(traj.states(i, t));
        }
        out << "\n";
    }
    write_json(json{{"m", m}, {"n", n}, {"T", traj.length()}}, path + ".json");
}

Trajectory read_trajectory_csv(const std::string& path) {
    const json sidecar = read_json(path + ".json");
    const Index m = sidecar.at("m").get<Index>();
    const Index n = sidecar.at("n").get<Index>();
    const Index T = sidecar.at("T").get<Index>();

    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::invalid_input, "cannot open trajectory file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::invalid_input, "empty trajectory file: " + path);
    }
    if (static_cast<Index>(split(line, ',').size()) != 1 + m + n) {
        throw Error(ErrorKind::invalid_input,
                    "trajectory header does not match sidecar dimensions: " + path);
    }
    Trajectory traj;
    traj.inputs.resize(m, T);
    traj.states.resize(n, T);
    Index t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (static_cast<Index>(fields.size()) != 1 + m + n || t >= T) {
            throw Error(ErrorKind::invalid_input, "trajectory row/dimension mismatch: " + path);
        }
        for (Index i = 0; i < m; ++i) {
            traj.inputs(i, t) = parse_double(fields[static_cast<size_t>(1 + i)]);
        }
        for (Index i = 0; i < n; ++i) {
            traj.states(i, t) = parse_double(fields[static_cast<size_t>(1 + m + i)]);
        }
        ++t;
    }
    if (t != T) {
        throw Error(ErrorKind::invalid_input, "trajectory length does not match sidecar T");
    }
    traj.validate();
    return traj;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw Error(ErrorKind::invalid_input, "expected a 2-d numeric array");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j.front().size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<size_t>(i));
        if (static_cast<Index>(row.size()) != cols) {
            throw Error(ErrorKind::invalid_input, "ragged matrix rows in JSON");
        }
        for (Index k = 0; k < cols; ++k) {
            m(i, k) = row.at(static_cast<size_t>(k)).get<double>();
        }
    }
    return m;
}

json system_to_json(const LtiSystem& sys) {
    return json{{"A", matrix_to_json(sys.A)}, {"B", matrix_to_json(sys.B)}};
}

LtiSystem system_from_json(const json& j) {
    LtiSystem sys{matrix_from_json(j.at("A")), matrix_from_json(j.at("B"))};
    sys.validate();
    return sys;
}

LtiSystem read_system(const std::string& path) {
    return system_from_json(read_json(path));
}

json pole_spec_to_json(const PoleSpec& spec) {
    json j;
    j["poles"] = json::array();
    for (const Complex& p : spec.poles) {
        j["poles"].push_back(complex_to_json(p));
    }
    if (spec.eigenvectors) {
        json rows = json::array();
        for (Index i = 0; i < spec.eigenvectors->rows(); ++i) {
            json row = json::array();
            for (Index k = 0; k < spec.eigenvectors->cols(); ++k) {
                row.push_back(complex_to_json((*spec.eigenvectors)(i, k)));
            }
            rows.push_back(row);
        }
        j["X"] = rows;
    }
    return j;
}

PoleSpec pole_spec_from_json(const json& j) {
    PoleSpec spec;
    for (const auto& p : j.at("poles")) {
        spec.poles.push_back(complex_from_json(p));
    }
    if (j.contains("X") && !j.at("X").is_null()) {
        const auto& rows = j.at("X");
        const Index r = static_cast<Index>(rows.size());
        if (r == 0) {
            throw Error(ErrorKind::invalid_input, "pole spec: empty eigenvector matrix");
        }
        const Index c = static_cast<Index>(rows.front().size());
        CMatrix X(r, c);
        for (Index i = 0; i < r; ++i) {
            const auto& row = rows.at(static_cast<size_t>(i));
            if (static_cast<Index>(row.size()) != c) {
                throw Error(ErrorKind::invalid_input, "pole spec: ragged eigenvector matrix");
            }
            for (Index k = 0; k < c; ++k) {
                X(i, k) = complex_from_json(row.at(static_cast<size_t>(k)));
            }
        }
        spec.eigenvectors = X;
    }
    return spec;
}

PoleSpec read_pole_spec(const std::string& path) {
    return pole_spec_from_json(read_json(path));
}

json gain_result_to_json(const GainResult& result) {
    json j;
    j["K"] = matrix_to_json(result.K);
    j["achieved_spectrum"] = json::array();
    for (Index i = 0; i < result.achieved_spectrum.size(); ++i) {
        j["achieved_spectrum"].push_back(complex_to_json(result.achieved_spectrum(i)));
    }
    j["placement_error"] = result.placement_error;
    j["eigvec_condition"] = result.eigvec_condition;
    j["per_pole_condition"] = json::array();
    for (double c : result.per_pole_condition) {
        if (std::isfinite(c)) {
            j["per_pole_condition"].push_back(c);
        } else {
            j["per_pole_condition"].push_back(nullptr);
        }
    }
    j["data_consistency_residual"] = result.data_consistency_residual;
    return j;
}

json identified_model_to_json(const IdentifiedModel& model) {
    return json{{"A_hat", matrix_to_json(model.A_hat)},
                {"B_hat", matrix_to_json(model.B_hat)},
                {"residual", model.residual}};
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::invalid_input, "cannot open for writing: " + path);
    }
    out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::invalid_input, "cannot open JSON file: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_input, "malformed JSON in " + path + ": " + e.what());
    }
}

} // namespace ddpole::io
