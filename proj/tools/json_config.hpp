#pragma once

// CLI11 config reader for JSON files. Top-level members address the options
// of the selected subcommand; nested objects name a subcommand explicitly.

#include <CLI11.hpp>
#include <json.hpp>

namespace radtherm::cli {

class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (results.size() == 1) {
          j[name] = results.front();
        } else {
          j[name] = results;
        }
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    std::vector<std::string> parents;
    if (root_ != nullptr) {
      for (const CLI::App* sub : root_->get_subcommands()) parents.push_back(sub->get_name());
    }
    collect(j, parents, items);
    return items;
  }

 private:
  const CLI::App* root_;

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
               std::vector<CLI::ConfigItem>& out) const {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        // A member naming a subcommand addresses it directly.
        std::vector<std::string> nested;
        if (root_ == nullptr || root_->get_subcommand_no_throw(key) == nullptr) nested = parents;
        nested.push_back(key);
        collect(value, nested, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs = {scalar(value)};
      }
      out.push_back(std::move(item));
    }
  }
};

}  // namespace radtherm::cli
