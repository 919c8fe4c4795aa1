#include "dris/naming.hpp"

#include "dris/error.hpp"

#include <array>
#include <utility>

namespace dris {

namespace {

bool label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

[[noreturn]] void bad_domain(std::string_view raw, std::string_view why) {
    throw Error(ErrorCode::bad_domain, "invalid domain '" + std::string(raw) + "': " + std::string(why));
}

constexpr std::array<std::pair<ResourceKind, std::string_view>, 6> kKinds{{
    {ResourceKind::webpage, "webpage"},
    {ResourceKind::ftp, "ftp"},
    {ResourceKind::video, "video"},
    {ResourceKind::pdf, "pdf"},
    {ResourceKind::picture, "picture"},
    {ResourceKind::database, "database"},
}};

}  // namespace

DomainName::DomainName(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (i) text_ += '.';
        text_ += labels_[i];
    }
}

DomainName DomainName::parse(std::string_view raw) {
    if (raw.empty()) bad_domain(raw, "empty");
    std::vector<std::string> labels;
    std::size_t start = 0;
    while (true) {
        const auto dot = raw.find('.', start);
        const auto piece = raw.substr(start, dot == std::string_view::npos ? raw.npos : dot - start);
        if (piece.empty()) bad_domain(raw, "empty label");
        if (piece.size() > max_label_length) bad_domain(raw, "label longer than 63 characters");
        std::string label;
        label.reserve(piece.size());
        for (char c : piece) {
            c = ascii_lower(c);
            if (!label_char(c)) bad_domain(raw, "illegal character");
            label += c;
        }
        if (label.front() == '-' || label.back() == '-') bad_domain(raw, "label starts or ends with '-'");
        labels.push_back(std::move(label));
        if (labels.size() > max_labels) bad_domain(raw, "more than 8 labels");
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return DomainName(std::move(labels));
}

std::optional<DomainName> DomainName::parent() const {
    if (labels_.size() < 2) return std::nullopt;
    return DomainName(std::vector<std::string>(labels_.begin() + 1, labels_.end()));
}

bool DomainName::is_parent_of(const DomainName& other) const {
    if (other.labels_.size() != labels_.size() + 1) return false;
    return std::equal(labels_.begin(), labels_.end(), other.labels_.begin() + 1);
}

Layer layer_of(const DomainName& d) {
    switch (d.label_count()) {
        case 1:
            return Layer::country;
        case 2:
            return Layer::sub_internet;
        default:
            return Layer::organization;
    }
}

std::string_view to_string(Layer layer) {
    switch (layer) {
        case Layer::country:
            return "country";
        case Layer::sub_internet:
            return "sub_internet";
        case Layer::organization:
            break;
    }
    return "organization";
}

std::string_view to_string(ResourceKind kind) {
    for (const auto& [k, tag] : kKinds) {
        if (k == kind) return tag;
    }
    return "webpage";
}

std::optional<ResourceKind> try_resource_kind(std::string_view tag) {
    for (const auto& [k, name] : kKinds) {
        if (name == tag) return k;
    }
    return std::nullopt;
}

ResourceKind resource_kind_from_string(std::string_view tag) {
    if (auto k = try_resource_kind(tag)) return *k;
    throw Error(ErrorCode::bad_query, "unknown resource kind '" + std::string(tag) + "'");
}

std::string class_name(const DomainName& d) {
    std::string out(class_prefix);
    const auto& labels = d.labels();
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
        if (it != labels.rbegin()) out += '.';
        out += *it;
    }
    return out;
}

std::string service_url(const DomainName& d) {
    return std::string(url_prefix) + d.str();
}

std::string resource_class(const DomainName& d, ResourceKind kind) {
    return class_name(d) + "." + std::string(to_string(kind));
}

}  // namespace dris
