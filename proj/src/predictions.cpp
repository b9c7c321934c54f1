#include "curvecv/predictions.hpp"

#include <fstream>

#include "curvecv/error.hpp"
#include "detail.hpp"

namespace curvecv {

void write_predictions(const std::filesystem::path& path,
                       const std::vector<Prediction>& preds) {
    std::string body;
    for (const auto& p : preds) {
        body += p.id;
        body += '\t';
        body += p.label;
        body += '\n';
    }
    detail::write_file(path, body);
}

namespace {

std::vector<Prediction> read_tsv(const std::filesystem::path& path, bool allow_gold3) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());

    std::vector<Prediction> out;
    std::string line;
    std::size_t line_no = 0;
    int columns = 0;  // fixed by the first record
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (allow_gold3 && line == "id\ttext\tlabel") continue;
        }
        auto fields = detail::split(line, '\t');
        int n = static_cast<int>(fields.size());
        bool acceptable = n == 2 || (allow_gold3 && n == 3);
        if (!acceptable || (columns != 0 && n != columns)) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected " +
                             (columns != 0 ? std::to_string(columns)
                                           : std::string(allow_gold3 ? "2 or 3" : "2")) +
                             " tab-separated columns, got " + std::to_string(n));
        }
        columns = n;
        Prediction p;
        p.id = std::move(fields[0]);
        p.label = std::move(fields[n == 3 ? 2 : 1]);
        if (p.id.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty id");
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    return read_tsv(path, false);
}

std::vector<Prediction> read_gold(const std::filesystem::path& path) {
    return read_tsv(path, true);
}

} // namespace curvecv
