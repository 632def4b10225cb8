#include "triopt/io.hpp"

#include "triopt/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace triopt {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const char* first = line.data() + start;
            const char* last = line.data() + comma;
            while (first < last && (*first == ' ' || *first == '\t')) ++first;
            while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
            double v = 0.0;
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last || first == last) {
                throw ParseError("non-numeric cell in row " + std::to_string(lineno) + ": '" +
                                     std::string(first, last) + "'",
                                 lineno);
            }
            row.push_back(v);
            start = comma + 1;
            if (comma == line.size()) break;
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("ragged row " + std::to_string(lineno) + ": expected " +
                                 std::to_string(width) + " columns, got " +
                                 std::to_string(row.size()),
                             lineno);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("empty CSV file " + path.string(), 0);
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

nlohmann::json dag_to_json(const WeightedDag& dag) {
    nlohmann::json edges = nlohmann::json::array();
    for (int j = 0; j < dag.dim; ++j) {
        for (int i = 0; i < dag.dim; ++i) {
            const double w = dag.weights(j, i);
            if (w != 0.0) {
                edges.push_back({{"from", j}, {"to", i}, {"w", w}});
            }
        }
    }
    return {{"edges", edges}, {"order", dag.topo_order}};
}

WeightedDag dag_from_json(const nlohmann::json& j) {
    WeightedDag dag;
    dag.topo_order = j.at("order").get<std::vector<int>>();
    dag.dim = static_cast<int>(dag.topo_order.size());
    dag.weights = Matrix::Zero(dag.dim, dag.dim);
    for (const auto& e : j.at("edges")) {
        dag.weights(e.at("from").get<int>(), e.at("to").get<int>()) = e.at("w").get<double>();
    }
    return dag;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what(), 0);
    }
    return j;
}

void write_order_json(const std::filesystem::path& path, const CausalOrder& order) {
    write_json(path, nlohmann::json(order.perm));
}

CausalOrder read_order_json(const std::filesystem::path& path) {
    const nlohmann::json j = read_json(path);
    CausalOrder order;
    if (j.is_array()) {
        order.perm = j.get<std::vector<int>>();
    } else if (j.is_object() && j.contains("order")) {
        order.perm = j.at("order").get<std::vector<int>>();
    } else {
        throw ParseError("order file must be a JSON array", 0);
    }
    if (!is_permutation(order.perm)) {
        throw ParseError("order file does not contain a permutation", 0);
    }
    return order;
}

}  // namespace triopt
