#include "cmcmc/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <vector>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw IoError("line " + std::to_string(line_no) + ": cannot parse '" +
                  std::string(field) + "' as a number");
  }
  return value;
}

std::size_t column_of(const std::vector<std::string>& header,
                      const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("missing CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path, DataKind kind,
                         const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  std::vector<std::string> header;
  for (auto f : split(line)) header.emplace_back(f);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, line_no));
    rows.push_back(std::move(row));
  }

  Dataset data;
  data.kind = kind;
  const auto n = static_cast<Eigen::Index>(rows.size());

  if (kind == DataKind::pairwise) {
    const auto h = column_of(header, "home_id");
    const auto v = column_of(header, "visitor_id");
    const auto o = column_of(header, "outcome");
    data.responses.resize(n);
    int max_id = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      Pair p{static_cast<int>(r[h]), static_cast<int>(r[v])};
      max_id = std::max({max_id, p.home, p.visitor});
      data.pairs.push_back(p);
      data.responses[i] = r[o];
    }
    data.num_teams = max_id + 1;
    data.features.resize(n, 0);
  } else if (kind == DataKind::location) {
    data.features.resize(n, static_cast<Eigen::Index>(header.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < header.size(); ++j) {
        data.features(i, static_cast<Eigen::Index>(j)) =
            rows[static_cast<std::size_t>(i)][j];
      }
    }
  } else {
    const auto y = column_of(header, response_column);
    data.features.resize(n, static_cast<Eigen::Index>(header.size() - 1));
    data.responses.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      Eigen::Index col = 0;
      for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == y) {
          data.responses[i] = r[j];
        } else {
          data.features(i, col++) = r[j];
        }
      }
    }
  }

  data.validate();
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       const std::string& response_column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.imbue(std::locale::classic());
  out << std::setprecision(17);

  if (data.kind == DataKind::pairwise) {
    out << "home_id,visitor_id,outcome\n";
    for (std::size_t i = 0; i < data.pairs.size(); ++i) {
      out << data.pairs[i].home << ',' << data.pairs[i].visitor << ','
          << data.responses[static_cast<Eigen::Index>(i)] << '\n';
    }
    return;
  }

  const auto p = data.features.cols();
  const bool has_y = data.kind != DataKind::location;
  for (Eigen::Index j = 0; j < p; ++j) {
    out << (j ? "," : "") << "x" << j + 1;
  }
  if (has_y) out << (p ? "," : "") << response_column;
  out << '\n';
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out << (j ? "," : "") << data.features(i, j);
    }
    if (has_y) out << (p ? "," : "") << data.responses[i];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cmcmc
