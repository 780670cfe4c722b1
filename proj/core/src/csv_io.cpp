#include "spath/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <vector>

#include "spath/errors.hpp"

namespace spath {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.pop_back();
  }
  return fields;
}

double parse_double(const std::string& field, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError("csv line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return value;
}

}  // namespace

SurvivalDataset read_survival_csv(std::istream& in, std::optional<double> tau) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  int covariate_dim = 0;
  std::vector<SurvivalRecord> records;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "time" || fields[1] != "status") {
        throw DataError("csv line " + std::to_string(line_no) +
                        ": expected header time,status[,z1,...]");
      }
      covariate_dim = int(fields.size()) - 2;
      header_seen = true;
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (int(fields.size()) != 2 + covariate_dim) {
      throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(2 + covariate_dim) + " fields, got " +
                      std::to_string(fields.size()));
    }
    SurvivalRecord record;
    record.time = parse_double(fields[0], line_no);
    if (fields[1] == "1") {
      record.status = Status::complete;
    } else if (fields[1] == "0") {
      record.status = Status::censored;
    } else {
      throw DataError("csv line " + std::to_string(line_no) + ": status must be 0 or 1, got '" +
                      fields[1] + "'");
    }
    for (int k = 0; k < covariate_dim; ++k) {
      record.covariates.push_back(parse_double(fields[std::size_t(k) + 2], line_no));
    }
    records.push_back(std::move(record));
  }
  if (!header_seen) throw DataError("csv: missing header line");

  if (records.empty()) {
    if (!tau) throw DataError("csv: no data rows; --tau is required for an empty dataset");
    return SurvivalDataset::empty(*tau);
  }
  double effective_tau;
  if (tau) {
    effective_tau = *tau;
  } else {
    effective_tau = 0.0;
    for (const auto& r : records) effective_tau = std::max(effective_tau, r.time);
  }
  return SurvivalDataset::from_records(std::move(records), effective_tau);
}

void write_survival_csv(std::ostream& out, const SurvivalDataset& data,
                        std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "time,status";
  for (int k = 1; k <= data.covariate_dim(); ++k) out << ",z" << k;
  out << "\n";
  for (const auto& r : data.records()) {
    out << format_double(r.time) << ',' << (r.status == Status::complete ? 1 : 0);
    for (double z : r.covariates) out << ',' << format_double(z);
    out << "\n";
  }
}

}  // namespace spath
