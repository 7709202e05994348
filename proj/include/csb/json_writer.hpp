#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

// Minimal ordered JSON value with deterministic serialization: object keys
// keep insertion order and every double is written with 17 significant
// digits, so identical runs produce identical bytes.

namespace csb {

class Json {
  public:
    Json() : type_(Type::null) {}
    Json(bool b) : type_(Type::boolean), bool_(b) {}
    Json(double v) : type_(Type::number), num_(v) {}
    Json(long long v) : type_(Type::integer), int_(v) {}
    Json(int v) : Json(static_cast<long long>(v)) {}
    Json(std::uint64_t v) : type_(Type::uinteger), uint_(v) {}
    Json(const char* s) : type_(Type::string), str_(s) {}
    Json(std::string s) : type_(Type::string), str_(std::move(s)) {}

    static Json array() {
        Json j;
        j.type_ = Type::array;
        return j;
    }
    static Json object() {
        Json j;
        j.type_ = Type::object;
        return j;
    }

    Json& push_back(Json v);
    Json& set(const std::string& key, Json v);

    std::string dump(int indent = 2) const;

  private:
    enum class Type { null, boolean, number, integer, uinteger, string, array, object };

    void write(std::string& out, int indent, int depth) const;
    static void write_escaped(std::string& out, const std::string& s);

    Type type_;
    bool bool_ = false;
    double num_ = 0.0;
    long long int_ = 0;
    std::uint64_t uint_ = 0;
    std::string str_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;
};

}  // namespace csb
