#ifndef SPATH_CSV_IO_HPP
#define SPATH_CSV_IO_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "spath/survival_data.hpp"

namespace spath {

/// Reads `time,status[,z1,...,zk]` rows; status 1 = complete, 0 = censored.
/// Lines starting with '#' are comments. When `tau` is absent the largest
/// observed time is used. Malformed rows raise DataError with the line
/// number.
SurvivalDataset read_survival_csv(std::istream& in, std::optional<double> tau);

/// Writes comment lines ('# ...'), the header, and one row per record in
/// input order. Times carry 17 significant digits so a read-back
/// reproduces them exactly.
void write_survival_csv(std::ostream& out, const SurvivalDataset& data,
                        std::span<const std::string> comments);

/// %.17g rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace spath

#endif
