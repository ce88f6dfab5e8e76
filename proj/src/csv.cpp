#include "measfid/csv.hpp"

#include "measfid/errors.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace measfid {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if(ec != std::errc()) throw DomainError("cannot format number");
    return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if(ec != std::errc() || end != text.data() + text.size()) throw DomainError("not a number: " + std::string(text));
    return value;
}

namespace {

    std::vector<std::string> split(const std::string &line) {
        std::vector<std::string> fields;
        std::string              field;
        std::istringstream       ss(line);
        while(std::getline(ss, field, ',')) fields.push_back(field);
        if(!line.empty() && line.back() == ',') fields.emplace_back();
        return fields;
    }

} // namespace

void CsvTable::add_row(std::vector<std::string> fields) {
    if(fields.size() != header_.size()) throw DomainError("CSV row width does not match the header");
    rows_.push_back(std::move(fields));
}

void CsvTable::write(std::ostream &out) const {
    auto line = [&out](const std::vector<std::string> &fields) {
        for(std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    line(header_);
    for(const auto &r : rows_) line(r);
}

std::string CsvTable::str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
}

CsvTable CsvTable::parse(std::istream &in) {
    std::string line;
    if(!std::getline(in, line)) throw DomainError("CSV input is empty");
    CsvTable table(split(line));
    while(std::getline(in, line)) {
        if(line.empty()) continue;
        table.add_row(split(line));
    }
    return table;
}

} // namespace measfid
