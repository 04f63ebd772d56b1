#include "obcs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "obcs/errors.hpp"

namespace obcs {

namespace {

void expect_header(std::istream& in, const std::string& magic) {
    std::string word;
    if (!(in >> word) || word != magic) {
        throw ConfigError("expected header '" + magic + "'");
    }
    if (!(in >> word) || word != "v1") {
        throw ConfigError(magic + ": unsupported version");
    }
}

Index read_dim(std::istream& in, const std::string& what) {
    long long v = 0;
    if (!(in >> v) || v < 1) {
        throw ConfigError("bad " + what + " in header");
    }
    return static_cast<Index>(v);
}

double read_value(std::istream& in, const std::string& what) {
    double v = 0.0;
    if (!(in >> v)) throw ConfigError("truncated or non-numeric " + what);
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    return in;
}

}  // namespace

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& out, const Matrix& A) {
    out << "obcs-matrix v1 " << A.rows() << ' ' << A.cols() << '\n';
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            if (j) out << ' ';
            out << fmt_double(A(i, j));
        }
        out << '\n';
    }
}

void write_signs(std::ostream& out, const Vector& y) {
    out << "obcs-signs v1 " << y.size() << '\n';
    for (Index i = 0; i < y.size(); ++i) {
        out << (y[i] > 0 ? "+1" : "-1") << '\n';
    }
}

void write_signal(std::ostream& out, const SparseSignal& x) {
    out << "obcs-signal v1 " << x.n << ' ' << static_cast<Index>(x.support.size()) << '\n';
    for (Index j : x.support) {
        out << (j + 1) << ' ' << fmt_double(x.values[j]) << '\n';
    }
}

Matrix read_matrix(std::istream& in) {
    expect_header(in, "obcs-matrix");
    const Index m = read_dim(in, "row count");
    const Index n = read_dim(in, "column count");
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            A(i, j) = read_value(in, "matrix entry");
        }
    }
    return A;
}

Vector read_signs(std::istream& in) {
    expect_header(in, "obcs-signs");
    const Index m = read_dim(in, "length");
    Vector y(m);
    for (Index i = 0; i < m; ++i) {
        const double v = read_value(in, "sign entry");
        if (v != 1.0 && v != -1.0) {
            throw ConfigError("sign entries must be +1 or -1");
        }
        y[i] = v;
    }
    return y;
}

SparseSignal read_signal(std::istream& in) {
    expect_header(in, "obcs-signal");
    const Index n = read_dim(in, "dimension");
    long long s = -1;
    if (!(in >> s) || s < 0 || s > n) throw ConfigError("bad sparsity in header");
    SparseSignal x;
    x.n = n;
    x.s = static_cast<Index>(s);
    x.values = Vector::Zero(n);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (long long k = 0; k < s; ++k) {
        long long idx = 0;
        if (!(in >> idx) || idx < 1 || idx > n) {
            throw ConfigError("signal index out of range (1-based)");
        }
        if (seen[static_cast<std::size_t>(idx - 1)]) {
            throw ConfigError("duplicate signal index");
        }
        seen[static_cast<std::size_t>(idx - 1)] = true;
        x.values[static_cast<Index>(idx - 1)] = read_value(in, "signal value");
        x.support.push_back(static_cast<Index>(idx - 1));
    }
    std::sort(x.support.begin(), x.support.end());
    return x;
}

void write_matrix_file(const std::string& path, const Matrix& A) {
    auto out = open_out(path);
    write_matrix(out, A);
}

void write_signs_file(const std::string& path, const Vector& y) {
    auto out = open_out(path);
    write_signs(out, y);
}

void write_signal_file(const std::string& path, const SparseSignal& x) {
    auto out = open_out(path);
    write_signal(out, x);
}

Matrix read_matrix_file(const std::string& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

Vector read_signs_file(const std::string& path) {
    auto in = open_in(path);
    return read_signs(in);
}

SparseSignal read_signal_file(const std::string& path) {
    auto in = open_in(path);
    return read_signal(in);
}

}  // namespace obcs
