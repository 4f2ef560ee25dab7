#pragma once

#include <string>
#include <vector>

namespace reglab {

/// CSV table with a fixed header; cells are preformatted strings.
class Table {
public:
    Table() = default;
    explicit Table(std::vector<std::string> header);

    void add(std::vector<std::string> row);
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t column(const std::string& name) const;

    std::string csv() const;
    void save(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string cell(double v);
std::string cell(int v);
std::string cell(std::size_t v);
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }
std::string verdict(bool pass);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Log-log line plot; non-positive points are skipped.
std::string svg_loglog(const std::string& title, const std::string& xlabel, const std::vector<Series>& series);

void write_text(const std::string& path, const std::string& text);

} // namespace reglab
