#pragma once

#include "dris/error.hpp"
#include "dris/records.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dris::wire {

using json = nlohmann::json;

inline constexpr std::size_t default_batch = 100;
inline constexpr std::size_t max_batch = 10000;

json to_json(const Document& doc);
json to_json(const MetadataRecord& rec);
json to_json(const CollectionDescription& cd);
json to_json(const Hit& hit);
json to_json(const ResultList& list);
json to_json(const HarvestBatch& batch);
json to_json(const DocumentBatch& batch);
json to_json(const ChildInfo& child);
json to_json(const RegisterRequest& req);

/// Decoders ignore unknown fields and throw Error(BAD_QUERY) on missing or mistyped ones
/// (BAD_DOMAIN / BAD_DATESTAMP when the field is present but malformed).
template <class T>
T from_json(const json& j);

template <> Document from_json<Document>(const json& j);
template <> MetadataRecord from_json<MetadataRecord>(const json& j);
template <> CollectionDescription from_json<CollectionDescription>(const json& j);
template <> Hit from_json<Hit>(const json& j);
template <> ResultList from_json<ResultList>(const json& j);
template <> HarvestBatch from_json<HarvestBatch>(const json& j);
template <> DocumentBatch from_json<DocumentBatch>(const json& j);
template <> ChildInfo from_json<ChildInfo>(const json& j);
template <> RegisterRequest from_json<RegisterRequest>(const json& j);

/// Parses text as JSON; malformed text is BAD_QUERY.
json parse_body(std::string_view body);

template <class T>
T decode(std::string_view body) {
    return from_json<T>(parse_body(body));
}

template <class T>
std::string encode(const T& value) {
    return to_json(value).dump();
}

/// {"error":{"code":...,"message":...}}
std::string error_body(ErrorCode code, std::string_view message);
/// Recovers the error carried by a non-2xx body; INTERNAL when the body is not an error object.
Error error_from_body(int status, std::string_view body);

/// Writes through a temporary file and rename, so readers never see a torn snapshot.
void write_json_file(const std::filesystem::path& path, const json& value);
json read_json_file(const std::filesystem::path& path);

/// Decoded resumption token contents.
struct TokenState {
    Datestamp snapshot;            // node clock when the harvest pass began
    std::uint64_t offset = 0;      // records already delivered in this pass
    std::uint64_t watermark = 0;   // last store revision visible to this pass

    friend bool operator==(const TokenState&, const TokenState&) = default;
};

/// Mints and checks resumption tokens for one node. Tokens carry a keyed checksum,
/// so text minted by another node (different key) or altered in transit is rejected.
class TokenCodec {
public:
    explicit TokenCodec(std::string node_key) : key_(std::move(node_key)) {}

    std::string mint(const TokenState& state) const;
    /// Throws Error(BAD_TOKEN).
    TokenState parse(std::string_view token) const;

private:
    std::uint64_t checksum(const TokenState& state) const;

    std::string key_;
};

}  // namespace dris::wire
