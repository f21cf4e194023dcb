#include "wassffed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "wassffed/errors.hpp"

namespace wassffed::data {

namespace {

// ---------------------------------------------------------------------------
// CSV machinery: RFC-4180 quoting, comma delimiter, whitespace-trimmed
// unquoted fields (the UCI files separate with ", ").

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> parse_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;

  auto push_field = [&]() {
    row.push_back(field_was_quoted ? field : trim(field));
    field.clear();
    field_was_quoted = false;
  };
  auto push_row = [&]() {
    push_field();
    bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(row);
    row.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      quoted = true;
      field_was_quoted = true;
      field.clear();
    } else if (c == ',') {
      push_field();
    } else if (c == '\n') {
      push_row();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!field.empty() || !row.empty()) push_row();
  return rows;
}

bool is_missing(const std::string& value) {
  return value.empty() || value == "?";
}

bool parse_double(const std::string& s, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Shared loader plumbing.

struct RawTable {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;  // data rows only
};

RawTable read_table(const std::filesystem::path& path,
                    const std::vector<std::string>& required) {
  auto rows = parse_csv(path);
  if (rows.empty()) {
    throw SchemaError(path.string() + " is empty");
  }
  RawTable table;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    table.columns.emplace(rows[0][c], c);
  }
  std::vector<std::string> missing;
  for (const std::string& name : required) {
    if (!table.columns.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const std::string& m : missing) {
      if (!list.empty()) list += ", ";
      list += m;
    }
    throw SchemaError(path.string() + " is missing required columns: " + list);
  }
  table.rows.assign(rows.begin() + 1, rows.end());
  return table;
}

struct LoaderRow {
  std::vector<double> numerics;
  std::vector<std::string> categoricals;
  int label = 0;
  bool white = false;
  bool male = false;
};

std::vector<fair::GroupLabel> group_set(GroupMode mode, bool adult) {
  if (mode == GroupMode::kMultiGroup) {
    return {{0, "white-male"},
            {1, "white-female"},
            {2, "non-white-male"},
            {3, "non-white-female"}};
  }
  if (adult) {
    return {{0, "male"}, {1, "female"}};  // gender is the Adult attribute
  }
  return {{0, "white"}, {1, "non-white"}};  // race for Compas
}

int group_of(const LoaderRow& row, GroupMode mode, bool adult) {
  if (mode == GroupMode::kMultiGroup) {
    if (row.white) return row.male ? 0 : 1;
    return row.male ? 2 : 3;
  }
  if (adult) return row.male ? 0 : 1;
  return row.white ? 0 : 1;
}

// Column-standardizes the numeric block in place (population sd); constant
// columns become all-zero.
void standardize(std::vector<double>& features, std::size_t dim,
                 std::size_t numeric_count) {
  const std::size_t n = features.size() / dim;
  for (std::size_t c = 0; c < numeric_count; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += features[i * dim + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = features[i * dim + c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    if (sd == 0.0) sd = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      features[i * dim + c] = (features[i * dim + c] - mean) / sd;
    }
  }
}

TabularDataset assemble(std::vector<LoaderRow> rows,
                        const std::vector<std::string>& numeric_names,
                        const std::vector<std::string>& categorical_names,
                        GroupMode mode, bool adult, std::size_t dropped,
                        std::string provenance) {
  if (rows.empty()) {
    throw SchemaError("no usable rows after preprocessing");
  }
  // Category values per categorical column, sorted for a stable layout.
  std::vector<std::vector<std::string>> categories(categorical_names.size());
  for (std::size_t c = 0; c < categorical_names.size(); ++c) {
    std::set<std::string> values;
    for (const LoaderRow& row : rows) values.insert(row.categoricals[c]);
    categories[c].assign(values.begin(), values.end());
  }

  std::size_t dim = numeric_names.size();
  for (const auto& values : categories) dim += values.size();

  TabularDataset out;
  out.samples.dim = dim;
  out.samples.features.reserve(rows.size() * dim);
  out.feature_names = numeric_names;
  for (std::size_t c = 0; c < categorical_names.size(); ++c) {
    for (const std::string& v : categories[c]) {
      out.feature_names.push_back(categorical_names[c] + "=" + v);
    }
  }
  out.group_labels = group_set(mode, adult);
  out.dropped_rows = dropped;
  out.provenance = std::move(provenance);

  for (const LoaderRow& row : rows) {
    out.samples.features.insert(out.samples.features.end(),
                                row.numerics.begin(), row.numerics.end());
    for (std::size_t c = 0; c < categories.size(); ++c) {
      for (const std::string& v : categories[c]) {
        out.samples.features.push_back(v == row.categoricals[c] ? 1.0 : 0.0);
      }
    }
    out.samples.labels.push_back(row.label);
    out.samples.groups.push_back(group_of(row, mode, adult));
  }
  standardize(out.samples.features, dim, numeric_names.size());
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TabularDataset load_adult(const std::filesystem::path& csv_path,
                          GroupMode mode) {
  const std::vector<std::string> numeric_names = {
      "age",          "fnlwgt",       "education-num",
      "capital-gain", "capital-loss", "hours-per-week"};
  const std::vector<std::string> categorical_names = {
      "workclass",    "education", "marital-status",
      "occupation",   "relationship", "native-country"};
  std::vector<std::string> required = numeric_names;
  required.insert(required.end(), categorical_names.begin(),
                  categorical_names.end());
  required.insert(required.end(), {"race", "sex", "income"});

  RawTable table = read_table(csv_path, required);

  std::vector<LoaderRow> rows;
  std::size_t dropped = 0;
  for (const auto& fields : table.rows) {
    if (fields.size() < table.columns.size()) {
      ++dropped;
      continue;
    }
    auto get = [&](const std::string& name) -> const std::string& {
      return fields[table.columns.at(name)];
    };
    LoaderRow row;
    bool ok = true;
    for (const std::string& name : numeric_names) {
      double v = 0.0;
      if (is_missing(get(name)) || !parse_double(get(name), &v)) {
        ok = false;
        break;
      }
      row.numerics.push_back(v);
    }
    if (ok) {
      for (const std::string& name : categorical_names) {
        if (is_missing(get(name))) {
          ok = false;
          break;
        }
        row.categoricals.push_back(get(name));
      }
    }
    const std::string& race = get("race");
    const std::string& sex = get("sex");
    const std::string& income = get("income");
    if (!ok || is_missing(race) || is_missing(sex) || is_missing(income)) {
      ++dropped;
      continue;
    }
    row.white = race == "White";
    row.male = sex == "Male";
    row.label = income.find(">50K") != std::string::npos ? 1 : 0;
    rows.push_back(std::move(row));
  }

  std::string provenance = "adult(" + csv_path.filename().string() +
                           ") rows=" + std::to_string(rows.size()) +
                           " dropped=" + std::to_string(dropped);
  return assemble(std::move(rows), numeric_names, categorical_names, mode,
                  /*adult=*/true, dropped, std::move(provenance));
}

TabularDataset load_compas(const std::filesystem::path& csv_path,
                           GroupMode mode) {
  const std::vector<std::string> numeric_names = {
      "age", "juv_fel_count", "juv_misd_count", "juv_other_count",
      "priors_count"};
  const std::vector<std::string> categorical_names = {"c_charge_degree"};
  std::vector<std::string> required = numeric_names;
  required.insert(required.end(), categorical_names.begin(),
                  categorical_names.end());
  required.insert(required.end(), {"sex", "race", "two_year_recid"});

  RawTable table = read_table(csv_path, required);
  const bool has_screening = table.columns.count("days_b_screening_arrest") > 0;
  const bool has_is_recid = table.columns.count("is_recid") > 0;

  std::vector<LoaderRow> rows;
  std::size_t dropped = 0;
  for (const auto& fields : table.rows) {
    if (fields.size() < table.columns.size()) {
      ++dropped;
      continue;
    }
    auto get = [&](const std::string& name) -> const std::string& {
      return fields[table.columns.at(name)];
    };
    // The conventional validity filters, applied when the columns exist.
    if (has_screening) {
      double days = 0.0;
      if (is_missing(get("days_b_screening_arrest")) ||
          !parse_double(get("days_b_screening_arrest"), &days) ||
          days < -30.0 || days > 30.0) {
        ++dropped;
        continue;
      }
    }
    if (has_is_recid && get("is_recid") == "-1") {
      ++dropped;
      continue;
    }
    if (get("c_charge_degree") == "O") {
      ++dropped;
      continue;
    }

    LoaderRow row;
    bool ok = true;
    for (const std::string& name : numeric_names) {
      double v = 0.0;
      if (is_missing(get(name)) || !parse_double(get(name), &v)) {
        ok = false;
        break;
      }
      row.numerics.push_back(v);
    }
    const std::string& sex = get("sex");
    const std::string& race = get("race");
    const std::string& recid = get("two_year_recid");
    if (!ok || is_missing(sex) || is_missing(race) || is_missing(recid) ||
        is_missing(get("c_charge_degree"))) {
      ++dropped;
      continue;
    }
    row.categoricals.push_back(get("c_charge_degree"));
    row.white = race == "Caucasian";
    row.male = sex == "Male";
    row.label = recid == "1" ? 1 : 0;
    rows.push_back(std::move(row));
  }

  std::string provenance = "compas(" + csv_path.filename().string() +
                           ") rows=" + std::to_string(rows.size()) +
                           " dropped=" + std::to_string(dropped);
  return assemble(std::move(rows), numeric_names, categorical_names, mode,
                  /*adult=*/false, dropped, std::move(provenance));
}

void save_cached(const TabularDataset& dataset,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SchemaError("cannot write " + path.string());
  }
  out << "# provenance = " << dataset.provenance << "\n";
  out << "# dropped_rows = " << dataset.dropped_rows << "\n";
  out << "# groups =";
  for (const auto& g : dataset.group_labels) {
    out << " " << g.id << ":" << g.name;
  }
  out << "\n";
  for (std::size_t c = 0; c < dataset.feature_names.size(); ++c) {
    out << dataset.feature_names[c] << ",";
  }
  out << "label,group\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto row = dataset.samples.row(i);
    for (double v : row) out << format_double(v) << ",";
    out << dataset.samples.labels[i] << "," << dataset.samples.groups[i]
        << "\n";
  }
}

TabularDataset load_cached(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  TabularDataset out;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# provenance = ", 0) == 0) {
      out.provenance = line.substr(15);
      continue;
    }
    if (line.rfind("# dropped_rows = ", 0) == 0) {
      out.dropped_rows = std::stoul(line.substr(17));
      continue;
    }
    if (line.rfind("# groups =", 0) == 0) {
      std::istringstream gs(line.substr(10));
      std::string tok;
      while (gs >> tok) {
        auto colon = tok.find(':');
        out.group_labels.push_back(
            {std::stoi(tok.substr(0, colon)), tok.substr(colon + 1)});
      }
      continue;
    }
    if (line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) {
      throw SchemaError("row width mismatch in " + path.string());
    }
    for (std::size_t c = 0; c + 2 < cells.size(); ++c) {
      out.samples.features.push_back(std::stod(cells[c]));
    }
    out.samples.labels.push_back(std::stoi(cells[cells.size() - 2]));
    out.samples.groups.push_back(std::stoi(cells[cells.size() - 1]));
  }
  if (header.size() < 3) {
    throw SchemaError(path.string() + " has no usable header");
  }
  out.samples.dim = header.size() - 2;
  out.feature_names.assign(header.begin(), header.end() - 2);
  return out;
}

TabularDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.sample_count == 0 || spec.dim == 0 || spec.group_count < 2) {
    throw ConfigError("synthetic dataset needs samples, features and >= 2 groups");
  }
  Rng rng(derive_seed(spec.seed, {kSeedSynthetic}));

  const std::size_t d = spec.dim;
  std::vector<double> true_w(d);
  const double pattern[5] = {1.5, -2.0, 1.0, 0.5, -1.0};
  double norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    true_w[k] = pattern[k % 5];
    norm += true_w[k] * true_w[k];
  }
  norm = std::sqrt(norm);

  std::vector<double> group_prob;
  std::vector<double> group_shift;  // mean shift along true_w, in sd units
  std::vector<double> group_bias;   // additive logit bias (noisy labels only)
  if (spec.group_count == 2) {
    group_prob = {0.6, 0.4};
    group_shift = {0.5, -0.5};
    group_bias = {0.8, -0.8};
  } else {
    group_prob.assign(spec.group_count, 0.0);
    group_shift.assign(spec.group_count, 0.0);
    group_bias.assign(spec.group_count, 0.0);
    for (int g = 0; g < spec.group_count; ++g) {
      group_prob[g] = 1.0 / static_cast<double>(spec.group_count) +
                      (g % 2 == 0 ? 0.05 : -0.05);
      group_shift[g] = -0.8 + 1.6 * g / static_cast<double>(spec.group_count - 1);
      group_bias[g] = 1.2 * group_shift[g];
    }
    double total = 0.0;
    for (double p : group_prob) total += p;
    for (double& p : group_prob) p /= total;
  }

  TabularDataset out;
  out.samples.dim = d;
  for (int g = 0; g < spec.group_count; ++g) {
    out.group_labels.push_back({g, "group-" + std::to_string(g)});
  }
  out.provenance = "synthetic(n=" + std::to_string(spec.sample_count) +
                   ",seed=" + std::to_string(spec.seed) +
                   (spec.separable ? ",separable" : "") + ")";
  for (std::size_t k = 0; k < d; ++k) {
    out.feature_names.push_back("x" + std::to_string(k));
  }

  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    double u = rng.uniform01();
    int g = 0;
    double cum = 0.0;
    for (int c = 0; c < spec.group_count; ++c) {
      cum += group_prob[c];
      if (u < cum || c == spec.group_count - 1) {
        g = c;
        break;
      }
    }
    std::vector<double> x(d);
    double z = 0.0;
    for (;;) {
      z = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = rng.normal() + group_shift[g] * true_w[k] / norm;
        z += true_w[k] * x[k];
      }
      if (!spec.separable || std::abs(z) >= 0.2) break;
    }
    int label;
    if (spec.separable) {
      label = z > 0.0 ? 1 : 0;
    } else {
      double p = 1.0 / (1.0 + std::exp(-(z + group_bias[g])));
      label = rng.uniform01() < p ? 1 : 0;
    }
    out.samples.features.insert(out.samples.features.end(), x.begin(), x.end());
    out.samples.labels.push_back(label);
    out.samples.groups.push_back(g);
  }
  standardize(out.samples.features, d, d);
  return out;
}

std::vector<std::vector<std::size_t>> dirichlet_partition(
    const TabularDataset& dataset, const PartitionSpec& spec) {
  if (spec.client_count < 2) {
    throw ConfigError("partition needs at least 2 clients");
  }
  if (!(spec.alpha > 0.0)) {
    throw ConfigError("dirichlet alpha must be positive");
  }
  // Samples of each group in dataset order.
  std::map<int, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_group[dataset.samples.groups[i]].push_back(i);
  }

  Rng rng(spec.seed);
  constexpr int kMaxRedraws = 100;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<std::vector<std::size_t>> clients(spec.client_count);
    for (const auto& [group_id, indices] : by_group) {
      std::vector<double> p = rng.dirichlet(spec.alpha, spec.client_count);
      std::vector<double> cdf(p.size());
      double acc = 0.0;
      for (std::size_t c = 0; c < p.size(); ++c) {
        acc += p[c];
        cdf[c] = acc;
      }
      for (std::size_t idx : indices) {
        double u = rng.uniform01() * acc;
        std::size_t c =
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (c >= clients.size()) c = clients.size() - 1;
        clients[c].push_back(idx);
      }
    }
    bool any_empty = false;
    for (const auto& shard : clients) {
      if (shard.empty()) {
        any_empty = true;
        break;
      }
    }
    if (!any_empty) return clients;
  }
  throw PartitionError("could not produce a partition without empty clients "
                       "after 100 redraws");
}

std::pair<TabularDataset, TabularDataset> train_test_split(
    const TabularDataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1), got " +
                      std::to_string(test_fraction));
  }
  const std::size_t n = dataset.size();
  if (n < 2) {
    throw ConfigError("cannot split a dataset with fewer than 2 samples");
  }
  Rng rng(seed);

  // (label, group) cells in deterministic key order.
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{dataset.samples.labels[i], dataset.samples.groups[i]}].push_back(i);
  }

  std::vector<std::size_t> test_idx;
  bool stratified = true;
  for (const auto& [key, members] : cells) {
    if (members.size() < 2) {
      stratified = false;
      break;
    }
  }

  if (!stratified) {
    std::cerr << "warning: some (label, group) cell has fewer than 2 samples; "
                 "falling back to a global shuffle split\n";
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    auto want = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    want = std::clamp<std::size_t>(want, 1, n - 1);
    test_idx.assign(order.begin(), order.begin() + want);
  } else {
    auto target = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));

    struct CellQuota {
      std::pair<int, int> key;
      std::size_t size;
      std::size_t take;
      double remainder;
    };
    std::vector<CellQuota> quotas;
    std::size_t total_take = 0;
    for (const auto& [key, members] : cells) {
      double exact = static_cast<double>(members.size()) * test_fraction;
      auto base = static_cast<std::size_t>(exact);
      base = std::clamp<std::size_t>(base, 1, members.size() - 1);
      quotas.push_back({key, members.size(), base,
                        exact - std::floor(exact)});
      total_take += base;
    }
    // Largest-remainder correction toward the exact global test count.
    std::vector<std::size_t> order(quotas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (quotas[a].remainder != quotas[b].remainder) {
        return quotas[a].remainder > quotas[b].remainder;
      }
      if (quotas[a].size != quotas[b].size) {
        return quotas[a].size > quotas[b].size;
      }
      return quotas[a].key < quotas[b].key;
    });
    std::size_t guard = 0;
    while (total_take != target && guard++ < 4 * quotas.size()) {
      bool moved = false;
      for (std::size_t i : order) {
        if (total_take < target && quotas[i].take < quotas[i].size - 1) {
          ++quotas[i].take;
          ++total_take;
          moved = true;
        } else if (total_take > target && quotas[i].take > 1) {
          --quotas[i].take;
          --total_take;
          moved = true;
        }
        if (total_take == target) break;
      }
      if (!moved) break;  // bounds block further correction; accept the drift
    }

    for (const CellQuota& q : quotas) {
      std::vector<std::size_t> members = cells[q.key];
      rng.shuffle(members);
      test_idx.insert(test_idx.end(), members.begin(),
                      members.begin() + q.take);
    }
  }

  std::vector<bool> in_test(n, false);
  for (std::size_t i : test_idx) in_test[i] = true;
  std::vector<std::size_t> train_idx;
  train_idx.reserve(n - test_idx.size());
  std::vector<std::size_t> test_sorted;
  test_sorted.reserve(test_idx.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (in_test[i]) {
      test_sorted.push_back(i);
    } else {
      train_idx.push_back(i);
    }
  }

  auto materialize = [&](const std::vector<std::size_t>& idx,
                         const char* tag) {
    TabularDataset part;
    part.samples = dataset.samples.subset(idx);
    part.feature_names = dataset.feature_names;
    part.group_labels = dataset.group_labels;
    part.dropped_rows = 0;
    part.provenance = dataset.provenance + " [" + tag + "]";
    return part;
  };
  return {materialize(train_idx, "train"), materialize(test_sorted, "test")};
}

std::size_t randomized_response(std::size_t bin_index, std::size_t bin_count,
                                double xi, Rng& rng) {
  if (bin_index >= bin_count) {
    throw DomainError("bin index " + std::to_string(bin_index) +
                      " out of range for " + std::to_string(bin_count) +
                      " bins");
  }
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw DomainError("xi must be in [0, 1], got " + std::to_string(xi));
  }
  if (rng.uniform01() < xi) {
    return rng.uniform_index(bin_count);
  }
  return bin_index;
}

}  // namespace wassffed::data
