#include "wassffed/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wassffed/errors.hpp"

namespace wassffed::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw ConfigError("config key '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw ConfigError("config key '" + key +
                      "' expects a nonnegative integer, got '" + value + "'");
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));

    if (key == "dataset") {
      config.dataset = value;
    } else if (key == "data_path") {
      config.data_path = value;
    } else if (key == "mode") {
      config.mode = value;
    } else if (key == "clients") {
      config.clients = to_uint(key, value);
    } else if (key == "alpha") {
      config.alpha = to_double(key, value);
    } else if (key == "rounds") {
      config.rounds = to_uint(key, value);
    } else if (key == "local_epochs") {
      config.local_epochs = to_uint(key, value);
    } else if (key == "beta") {
      config.beta = to_double(key, value);
    } else if (key == "bins") {
      config.bins = to_uint(key, value);
    } else if (key == "xi") {
      config.xi = to_double(key, value);
    } else if (key == "epsilon") {
      config.epsilon = to_double(key, value);
    } else if (key == "lr") {
      config.lr = to_double(key, value);
    } else if (key == "batch_size") {
      config.batch_size = to_uint(key, value);
    } else if (key == "optimizer") {
      config.optimizer = value;
    } else if (key == "seed") {
      config.seed = to_uint(key, value);
    } else if (key == "repeats") {
      config.repeats = to_uint(key, value);
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": unknown config key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text, path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "dataset = " << c.dataset << "\n";
  out << "data_path = " << c.data_path << "\n";
  out << "mode = " << c.mode << "\n";
  out << "clients = " << c.clients << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "rounds = " << c.rounds << "\n";
  out << "local_epochs = " << c.local_epochs << "\n";
  out << "beta = " << format_double(c.beta) << "\n";
  out << "bins = " << c.bins << "\n";
  out << "xi = " << format_double(c.xi) << "\n";
  out << "epsilon = " << format_double(c.epsilon) << "\n";
  out << "lr = " << format_double(c.lr) << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "optimizer = " << c.optimizer << "\n";
  out << "seed = " << c.seed << "\n";
  out << "repeats = " << c.repeats << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  return out.str();
}

void validate(const ExperimentConfig& c) {
  if (c.dataset != "adult" && c.dataset != "compas" &&
      c.dataset != "synthetic") {
    throw ConfigError(
        "dataset must be one of adult, compas, synthetic; got '" + c.dataset +
        "'");
  }
  if (c.dataset != "synthetic" && c.data_path.empty()) {
    throw ConfigError("data_path is required for dataset '" + c.dataset + "'");
  }
  if (c.mode != "multi-group" && c.mode != "two-group") {
    throw ConfigError("mode must be multi-group or two-group, got '" + c.mode +
                      "'");
  }
  if (c.clients < 2) {
    throw ConfigError("clients must be >= 2, got " +
                      std::to_string(c.clients));
  }
  if (!(c.alpha > 0.0)) {
    throw ConfigError("alpha must be > 0");
  }
  if (c.local_epochs < 1) {
    throw ConfigError("local_epochs must be >= 1");
  }
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) {
    throw ConfigError("beta must be in [0, 1]");
  }
  if (c.bins < 2) {
    throw ConfigError("bins must be >= 2");
  }
  if (!(c.xi >= 0.0 && c.xi < 1.0)) {
    throw ConfigError("xi must be in [0, 1)");
  }
  if (!(c.epsilon > 0.0)) {
    throw ConfigError("epsilon must be > 0");
  }
  if (!(c.lr >= 0.0)) {
    throw ConfigError("lr must be >= 0");
  }
  if (c.batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (c.optimizer != "sgd" && c.optimizer != "adam") {
    throw ConfigError("optimizer must be sgd or adam, got '" + c.optimizer +
                      "'");
  }
  if (c.repeats < 1) {
    throw ConfigError("repeats must be >= 1");
  }
}

}  // namespace wassffed::cli
