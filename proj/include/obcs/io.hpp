#ifndef OBCS_IO_HPP
#define OBCS_IO_HPP

#include <iosfwd>
#include <string>

#include "obcs/core.hpp"

namespace obcs {

// %.17g, enough digits to round-trip a double exactly. Infinities come out
// as "inf" / "-inf" on every platform.
std::string fmt_double(double v);

// Text formats, one header line each:
//   obcs-matrix v1 <m> <n>   then m rows of n floats
//   obcs-signs  v1 <m>       then m entries, +1 or -1
//   obcs-signal v1 <n> <s>   then s lines "<index> <value>", 1-based indices
void write_matrix(std::ostream& out, const Matrix& A);
void write_signs(std::ostream& out, const Vector& y);
void write_signal(std::ostream& out, const SparseSignal& x);

// Readers throw ConfigError on any malformed or inconsistent input.
Matrix read_matrix(std::istream& in);
Vector read_signs(std::istream& in);
SparseSignal read_signal(std::istream& in);

void write_matrix_file(const std::string& path, const Matrix& A);
void write_signs_file(const std::string& path, const Vector& y);
void write_signal_file(const std::string& path, const SparseSignal& x);

Matrix read_matrix_file(const std::string& path);
Vector read_signs_file(const std::string& path);
SparseSignal read_signal_file(const std::string& path);

}  // namespace obcs

#endif
