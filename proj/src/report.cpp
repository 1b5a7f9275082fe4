#include "qdev/report.hpp"

#include "qdev/io.hpp"

namespace qdev {

namespace {

void render_text_node(const ReportBody& node, const std::string& prefix,
                      std::string& out) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            render_text_node(it.value(), key, out);
        }
        return;
    }
    if (node.is_array()) {
        std::size_t i = 0;
        for (const auto& item : node) {
            render_text_node(item, prefix + "[" + std::to_string(i) + "]", out);
            ++i;
        }
        return;
    }
    out += prefix;
    out += " = ";
    if (node.is_number_float()) {
        out += io::format_double(node.get<double>());
    } else if (node.is_string()) {
        out += node.get<std::string>();
    } else {
        out += node.dump();
    }
    out += "\n";
}

} // namespace

std::string render_report_json(const ReportBody& body) {
    return body.dump(2) + "\n";
}

std::string render_report_text(const ReportBody& body) {
    std::string out;
    render_text_node(body, "", out);
    return out;
}

} // namespace qdev
