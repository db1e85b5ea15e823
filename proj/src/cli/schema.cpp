#include <cmath>
#include <string>

#include "admpriors/cli.hpp"
#include "admpriors/schema_text.hpp"

namespace admpriors::cli {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  return false;
}

std::string type_list(const json& t) { return t.is_string() ? t.get<std::string>() : t.dump(); }

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& at) {
    if (s.contains("$ref")) {
      check(v, resolve(s["$ref"].get<std::string>()), at);
      return;
    }
    if (s.contains("type")) {
      const json& t = s["type"];
      bool ok = false;
      if (t.is_string()) {
        ok = has_type(v, t.get<std::string>());
      } else {
        for (const auto& one : t) ok = ok || has_type(v, one.get<std::string>());
      }
      if (!ok) {
        fail(at, "expected type " + type_list(t));
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) fail(at, "value " + v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) fail(at, "below minimum " + s["minimum"].dump());
      if (s.contains("maximum") && x > s["maximum"].get<double>()) fail(at, "above maximum " + s["maximum"].dump());
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        fail(at, "must exceed " + s["exclusiveMinimum"].dump());
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
        fail(at, "must be below " + s["exclusiveMaximum"].dump());
    }
    if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<std::size_t>()) {
      fail(at, "string shorter than " + s["minLength"].dump());
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail(at, "fewer than " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) fail(at, "more than " + s["maxItems"].dump() + " items");
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], at + "/" + std::to_string(i));
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& r : s["required"]) {
          if (!v.contains(r.get<std::string>())) fail(at, "missing required property '" + r.get<std::string>() + "'");
        }
      }
      const json empty = json::object();
      const json& props = s.contains("properties") ? s["properties"] : empty;
      for (const auto& [key, value] : v.items()) {
        if (props.contains(key)) {
          check(value, props[key], at + "/" + key);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          fail(at, "unknown property '" + key + "'");
        }
      }
    }
  }

  std::vector<std::string> errors;

 private:
  const json& resolve(const std::string& ref) {
    if (ref.rfind("#/", 0) != 0) throw std::runtime_error("schema: only local references are supported: " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
  }
  void fail(const std::string& at, const std::string& msg) { errors.push_back((at.empty() ? "/" : at) + ": " + msg); }

  const json& root_;
};

}  // namespace

const nlohmann::json& run_config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kRunConfigSchemaText);
  return schema;
}

std::vector<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema) {
  Validator v(schema);
  v.check(doc, schema, "");
  return v.errors;
}

}  // namespace admpriors::cli
