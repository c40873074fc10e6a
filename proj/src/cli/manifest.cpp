#include <fstream>

#include <json.hpp>

#include "bos/cli.hpp"
#include "bos/error.hpp"
#include "bos/hash.hpp"

namespace bos::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

Manifest::Manifest(fs::path file, std::vector<std::string> command)
    : file_(std::move(file)), command_(std::move(command)) {}

void Manifest::add_config(const fs::path& path) { configs_.push_back(path); }
void Manifest::add_input(const fs::path& path) { inputs_.push_back(path); }

void Manifest::add_output(const fs::path& path) {
  if (std::find(outputs_.begin(), outputs_.end(), path) == outputs_.end()) {
    outputs_.push_back(path);
  }
}

void Manifest::stage_done(std::string name) { stages_done_.push_back(std::move(name)); }

void Manifest::stage_failed(std::string name, std::string message) {
  failure_.emplace(std::move(name), std::move(message));
}

namespace {

ordered_json file_entry(const fs::path& shown, const fs::path& actual) {
  ordered_json e;
  e["path"] = shown.generic_string();
  std::error_code ec;
  if (fs::is_regular_file(actual, ec)) {
    e["fnv1a64"] = to_hex(fnv1a64_file(actual));
  } else {
    e["fnv1a64"] = nullptr;
  }
  return e;
}

}  // namespace

void Manifest::write() const {
  const fs::path dir = file_.parent_path();
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = command_;
  j["configs"] = ordered_json::array();
  for (const fs::path& p : configs_) j["configs"].push_back(file_entry(p, p));
  j["inputs"] = ordered_json::array();
  for (const fs::path& p : inputs_) j["inputs"].push_back(file_entry(p, p));
  j["outputs"] = ordered_json::array();
  for (const fs::path& p : outputs_) {
    const fs::path rel = p.lexically_relative(dir.empty() ? fs::path(".") : dir);
    const bool beneath = !rel.empty() && *rel.begin() != "..";
    j["outputs"].push_back(file_entry(beneath ? rel : p, p));
  }
  j["stages_completed"] = stages_done_;
  if (failure_) {
    j["failed_stage"] = {{"stage", failure_->first}, {"error", failure_->second}};
  }
  if (duration_ms_) {
    j["duration_ms"] = *duration_ms_;
  } else {
    j["duration_ms"] = nullptr;
  }

  std::ofstream out(file_, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write manifest " + file_.string());
  }
  out << j.dump(2) << '\n';
}

}  // namespace bos::cli
