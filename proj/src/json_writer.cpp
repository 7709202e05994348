#include "csb/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace csb {

Json& Json::push_back(Json v) {
    if (type_ != Type::array) throw std::logic_error("Json::push_back on non-array");
    arr_.push_back(std::move(v));
    return *this;
}

Json& Json::set(const std::string& key, Json v) {
    if (type_ != Type::object) throw std::logic_error("Json::set on non-object");
    obj_.emplace_back(key, std::move(v));
    return *this;
}

void Json::write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void Json::write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
    char buf[48];
    switch (type_) {
        case Type::null: out += "null"; break;
        case Type::boolean: out += bool_ ? "true" : "false"; break;
        case Type::number:
            if (!std::isfinite(num_)) {
                throw std::logic_error("Json: non-finite number in output");
            }
            std::snprintf(buf, sizeof(buf), "%.17g", num_);
            out += buf;
            break;
        case Type::integer:
            std::snprintf(buf, sizeof(buf), "%lld", int_);
            out += buf;
            break;
        case Type::uinteger:
            std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(uint_));
            out += buf;
            break;
        case Type::string: write_escaped(out, str_); break;
        case Type::array:
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (size_t i = 0; i < arr_.size(); ++i) {
                out += pad_in;
                arr_[i].write(out, indent, depth + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        case Type::object:
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (size_t i = 0; i < obj_.size(); ++i) {
                out += pad_in;
                write_escaped(out, obj_[i].first);
                out += ": ";
                obj_[i].second.write(out, indent, depth + 1);
                if (i + 1 < obj_.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    out += '\n';
    return out;
}

}  // namespace csb
