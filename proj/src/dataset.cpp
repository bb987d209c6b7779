#include "ramplab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ramplab/errors.hpp"

namespace ramplab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool is_binary01(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return x == 0.0 || x == 1.0; });
}

}  // namespace

bool Dataset::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& Dataset::column(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return columns[j];
    }
    raise(ErrorCode::UnknownColumn, "no column named '" + name + "'");
}

Dataset load_csv(const std::string& path, const std::string& outcome,
                 const std::vector<std::string>& regressors) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) {
        raise(ErrorCode::IoError, "empty file '" + path + "'");
    }
    const std::vector<std::string> col_names_raw = split_csv_line(header);
    std::vector<std::string> col_names;
    col_names.reserve(col_names_raw.size());
    for (const auto& c : col_names_raw) col_names.push_back(trim(c));

    auto find_col = [&](const std::string& name) -> int {
        for (std::size_t j = 0; j < col_names.size(); ++j) {
            if (col_names[j] == name) return static_cast<int>(j);
        }
        return -1;
    };

    const int y_idx = find_col(outcome);
    if (y_idx < 0) raise(ErrorCode::MissingColumn, "outcome '" + outcome + "' not in header");
    std::vector<int> x_idx;
    for (const auto& r : regressors) {
        const int j = find_col(r);
        if (j < 0) raise(ErrorCode::MissingColumn, "regressor '" + r + "' not in header");
        x_idx.push_back(j);
    }

    constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> y_all;
    std::vector<std::vector<double>> x_all(regressors.size());
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        auto parse_field = [&](int j) -> double {
            if (j >= static_cast<int>(fields.size())) return kMissing;
            const std::string f = trim(fields[static_cast<std::size_t>(j)]);
            if (f.empty()) return kMissing;
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(f, &pos);
            } catch (const std::exception&) {
                raise(ErrorCode::IoError, "unparseable field '" + f + "' at line " +
                                              std::to_string(line_no));
            }
            if (pos != f.size()) {
                raise(ErrorCode::IoError, "unparseable field '" + f + "' at line " +
                                              std::to_string(line_no));
            }
            return v;
        };
        y_all.push_back(parse_field(y_idx));
        for (std::size_t k = 0; k < x_idx.size(); ++k) {
            x_all[k].push_back(parse_field(x_idx[k]));
        }
    }

    Dataset out;
    out.names = regressors;
    out.columns.assign(regressors.size(), {});
    for (std::size_t i = 0; i < y_all.size(); ++i) {
        bool complete = !std::isnan(y_all[i]);
        for (const auto& col : x_all) {
            if (std::isnan(col[i])) complete = false;
        }
        if (!complete) {
            ++out.n_dropped;
            continue;
        }
        out.y.push_back(y_all[i]);
        for (std::size_t k = 0; k < x_all.size(); ++k) {
            out.columns[k].push_back(x_all[k][i]);
        }
    }

    if (out.y.empty()) {
        raise(ErrorCode::EmptyAfterCompleteCase, "no complete cases in '" + path + "'");
    }
    if (!is_binary01(out.y)) {
        raise(ErrorCode::NonBinaryOutcome, "outcome '" + outcome + "' has values outside {0,1}");
    }
    return out;
}

Dataset make_dataset(std::vector<std::string> names,
                     std::vector<std::vector<double>> columns,
                     std::vector<double> y) {
    if (names.size() != columns.size()) {
        raise(ErrorCode::DimensionMismatch, "names/columns size mismatch");
    }
    for (const auto& c : columns) {
        if (c.size() != y.size()) {
            raise(ErrorCode::DimensionMismatch, "column length differs from outcome length");
        }
    }
    if (!is_binary01(y)) {
        raise(ErrorCode::NonBinaryOutcome, "outcome has values outside {0,1}");
    }
    Dataset out;
    out.names = std::move(names);
    out.columns = std::move(columns);
    out.y = std::move(y);
    return out;
}

int DesignMatrix::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].name == name) return static_cast<int>(j);
    }
    return -1;
}

namespace {

void check_rank(const DesignMatrix& d) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.X);
    const auto& sv = svd.singularValues();
    const double ratio = sv(sv.size() - 1) / sv(0);
    if (!(ratio > 1e-10)) {
        // name a dependent column via pivoted QR
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
        qr.setThreshold(1e-10);
        const auto rank = qr.rank();
        std::string culprit = "<unknown>";
        if (rank < d.X.cols()) {
            const auto perm = qr.colsPermutation().indices();
            culprit = d.cols[static_cast<std::size_t>(perm(rank))].name;
        }
        raise(ErrorCode::RankDeficient,
              "design matrix numerically rank-deficient (sv ratio " +
                  std::to_string(ratio) + "); dependent column: " + culprit);
    }
}

}  // namespace

DesignMatrix build_design(const Dataset& data, const DesignSpec& spec) {
    const std::size_t n = data.n();

    std::vector<std::string> base = spec.regressors;
    std::string w_name;
    std::vector<std::string> z_names;
    const bool full = spec.full_interactions_with.has_value();
    if (full) {
        w_name = *spec.full_interactions_with;
        if (!data.has_column(w_name)) {
            raise(ErrorCode::UnknownColumn, "full-interaction column '" + w_name + "' not found");
        }
        if (!is_binary01(data.column(w_name))) {
            raise(ErrorCode::NotBinary, "full-interaction column '" + w_name + "' is not 0/1");
        }
        for (const auto& r : base) {
            if (r != w_name) z_names.push_back(r);
        }
    }

    std::vector<ColumnInfo> cols;
    std::vector<const std::vector<double>*> sources;  // raw columns (non-interaction)

    cols.push_back({ColumnKind::Intercept, "const", -1, -1});
    sources.push_back(nullptr);

    auto push_raw = [&](const std::string& name) {
        const auto& col = data.column(name);
        ColumnInfo info;
        info.name = name;
        info.kind = is_binary01(col) ? ColumnKind::Binary : ColumnKind::Continuous;
        cols.push_back(info);
        sources.push_back(&col);
    };

    struct PendingInteraction {
        std::string a, b;
    };
    std::vector<PendingInteraction> pending;

    if (full) {
        for (const auto& z : z_names) push_raw(z);
        push_raw(w_name);
        for (const auto& z : z_names) pending.push_back({z, w_name});
    } else {
        for (const auto& r : base) push_raw(r);
        for (const auto& [a, b] : spec.interactions) pending.push_back({a, b});
    }

    const std::size_t k_raw = cols.size();
    const std::size_t k = k_raw + pending.size();
    if (k < 2) raise(ErrorCode::InvalidArgument, "need at least one regressor (K >= 2)");
    if (n <= k) {
        raise(ErrorCode::InvalidArgument,
              "need more observations than columns (N=" + std::to_string(n) +
                  ", K=" + std::to_string(k) + ")");
    }

    DesignMatrix d;
    d.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) d.y(static_cast<Eigen::Index>(i)) = data.y[i];

    d.X.col(0).setOnes();
    for (std::size_t j = 1; j < k_raw; ++j) {
        const auto& src = *sources[j];
        for (std::size_t i = 0; i < n; ++i) {
            d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[i];
        }
    }
    d.cols = std::move(cols);

    for (std::size_t p = 0; p < pending.size(); ++p) {
        const auto& [a, b] = pending[p];
        int ia = -1, ib = -1;
        for (std::size_t j = 0; j < d.cols.size(); ++j) {
            if (d.cols[j].name == a) ia = static_cast<int>(j);
            if (d.cols[j].name == b) ib = static_cast<int>(j);
        }
        if (ia < 0 || ib < 0) {
            raise(ErrorCode::UnknownColumn,
                  "interaction parent '" + (ia < 0 ? a : b) + "' not among regressors");
        }
        const std::size_t j = k_raw + p;
        ColumnInfo info;
        info.kind = ColumnKind::Interaction;
        info.name = a + ":" + b;
        info.parent_a = ia;
        info.parent_b = ib;
        d.cols.push_back(info);
        d.X.col(static_cast<Eigen::Index>(j)) =
            d.X.col(ia).cwiseProduct(d.X.col(ib));
    }

    check_rank(d);
    return d;
}

ValidationReport validate(const DesignMatrix& design) {
    ValidationReport rep;
    const std::size_t n = design.n();
    for (std::size_t j = 0; j < design.k(); ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = design.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        rep.columns.push_back({design.cols[j].name, mathx::moments(col)});
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design.X);
    const auto& sv = svd.singularValues();
    rep.sv_ratio = sv(sv.size() - 1) / sv(0);
    rep.rank_ok = rep.sv_ratio > 1e-10;
    return rep;
}

}  // namespace ramplab
