#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dris {

/// A validated dotted domain name such as "hust.edu.cn".
///
/// Labels are stored lowercase, most specific first. Up to 8 labels of
/// 1..63 characters from [a-z0-9-], never starting or ending with '-'.
class DomainName {
public:
    static constexpr std::size_t max_labels = 8;
    static constexpr std::size_t max_label_length = 63;

    /// Throws Error(BAD_DOMAIN).
    static DomainName parse(std::string_view raw);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t label_count() const noexcept { return labels_.size(); }

    /// Canonical lowercase text.
    const std::string& str() const noexcept { return text_; }

    /// One label shorter; empty for a single-label name.
    std::optional<DomainName> parent() const;

    /// True when `other` is exactly one label deeper and ends with this name.
    bool is_parent_of(const DomainName& other) const;

    friend bool operator==(const DomainName& a, const DomainName& b) { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const DomainName& a, const DomainName& b) {
        return a.text_ <=> b.text_;
    }

private:
    explicit DomainName(std::vector<std::string> labels);

    std::vector<std::string> labels_;
    std::string text_;
};

inline DomainName parse_domain(std::string_view raw) { return DomainName::parse(raw); }

/// Country = 1 label, SubInternet = 2 labels, Organization = 3 or more.
enum class Layer { country = 1, sub_internet = 2, organization = 3 };

Layer layer_of(const DomainName& d);
std::string_view to_string(Layer layer);

enum class ResourceKind { webpage, ftp, video, pdf, picture, database };

std::string_view to_string(ResourceKind kind);
/// Throws Error(BAD_QUERY) for an unknown tag.
ResourceKind resource_kind_from_string(std::string_view tag);
std::optional<ResourceKind> try_resource_kind(std::string_view tag);

inline constexpr std::string_view class_prefix = "DRIS.";
inline constexpr std::string_view url_prefix = "http://DRIS.";

/// "DRIS." followed by the labels in reverse order: hust.edu.cn -> DRIS.cn.edu.hust.
std::string class_name(const DomainName& d);

/// Conventional endpoint of a node: hust.edu.cn -> http://DRIS.hust.edu.cn.
std::string service_url(const DomainName& d);

/// Class of a per-kind sub-service: (hust.edu.cn, ftp) -> DRIS.cn.edu.hust.ftp.
std::string resource_class(const DomainName& d, ResourceKind kind);

}  // namespace dris

template <>
struct std::hash<dris::DomainName> {
    std::size_t operator()(const dris::DomainName& d) const noexcept {
        return std::hash<std::string>{}(d.str());
    }
};
