#include "dris/wire.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dris::wire {

namespace {

[[noreturn]] void bad_field(const std::exception& e) {
    throw Error(ErrorCode::bad_query, std::string("malformed message: ") + e.what());
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        bad_field(e);
    }
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

json to_json(const Document& doc) {
    json j{{"identifier", doc.identifier},
           {"kind", to_string(doc.kind)},
           {"title", doc.title},
           {"body", doc.body}};
    j["datestamp"] = doc.datestamp ? json(format_datestamp(*doc.datestamp)) : json(nullptr);
    return j;
}

template <>
Document from_json<Document>(const json& j) {
    return guarded([&] {
        Document doc;
        doc.identifier = j.at("identifier").get<std::string>();
        if (auto kind = optional_string(j, "kind")) doc.kind = resource_kind_from_string(*kind);
        doc.title = j.value("title", std::string{});
        doc.body = j.value("body", std::string{});
        if (auto ds = optional_string(j, "datestamp")) doc.datestamp = parse_datestamp(*ds);
        return doc;
    });
}

json to_json(const MetadataRecord& rec) {
    return json{{"identifier", rec.identifier},         {"source", rec.source.str()},
                {"kind", to_string(rec.kind)},           {"title", rec.title},
                {"description", rec.description},        {"datestamp", format_datestamp(rec.datestamp)}};
}

template <>
MetadataRecord from_json<MetadataRecord>(const json& j) {
    return guarded([&] {
        return MetadataRecord{
            .identifier = j.at("identifier").get<std::string>(),
            .source = parse_domain(j.at("source").get<std::string>()),
            .kind = resource_kind_from_string(j.at("kind").get<std::string>()),
            .title = j.at("title").get<std::string>(),
            .description = j.at("description").get<std::string>(),
            .datestamp = parse_datestamp(j.at("datestamp").get<std::string>()),
        };
    });
}

json to_json(const CollectionDescription& cd) {
    json kinds = json::object();
    for (const auto& [kind, count] : cd.kinds) kinds[std::string(to_string(kind))] = count;
    json terms = json::object();
    for (const auto& [term, df] : cd.terms) terms[term] = df;
    return json{{"domain", cd.domain.str()},
                {"doc_count", cd.doc_count},
                {"kinds", std::move(kinds)},
                {"terms", std::move(terms)},
                {"generated_at", format_datestamp(cd.generated_at)}};
}

template <>
CollectionDescription from_json<CollectionDescription>(const json& j) {
    return guarded([&] {
        CollectionDescription cd{.domain = parse_domain(j.at("domain").get<std::string>())};
        cd.doc_count = j.at("doc_count").get<std::uint64_t>();
        for (const auto& [kind, count] : j.at("kinds").items()) {
            cd.kinds[resource_kind_from_string(kind)] = count.get<std::uint64_t>();
        }
        for (const auto& [term, df] : j.at("terms").items()) cd.terms[term] = df.get<std::uint64_t>();
        cd.generated_at = parse_datestamp(j.at("generated_at").get<std::string>());
        return cd;
    });
}

json to_json(const Hit& hit) {
    return json{{"source", hit.source.str()},
                {"id", hit.id},
                {"title", hit.title},
                {"kind", to_string(hit.kind)},
                {"score", hit.score}};
}

template <>
Hit from_json<Hit>(const json& j) {
    return guarded([&] {
        return Hit{
            .source = parse_domain(j.at("source").get<std::string>()),
            .id = j.at("id").get<std::string>(),
            .title = j.at("title").get<std::string>(),
            .kind = resource_kind_from_string(j.at("kind").get<std::string>()),
            .score = j.at("score").get<double>(),
        };
    });
}

json to_json(const ResultList& list) {
    json hits = json::array();
    for (const auto& hit : list.hits) hits.push_back(to_json(hit));
    return json{{"query", list.query}, {"k", list.k}, {"partial", list.partial}, {"hits", std::move(hits)}};
}

template <>
ResultList from_json<ResultList>(const json& j) {
    return guarded([&] {
        ResultList list;
        list.query = j.at("query").get<std::string>();
        list.k = j.at("k").get<std::size_t>();
        list.partial = j.at("partial").get<bool>();
        for (const auto& h : j.at("hits")) list.hits.push_back(from_json<Hit>(h));
        return list;
    });
}

json to_json(const HarvestBatch& batch) {
    json records = json::array();
    for (const auto& rec : batch.records) records.push_back(to_json(rec));
    return json{{"records", std::move(records)},
                {"token", batch.token ? json(*batch.token) : json(nullptr)},
                {"complete", batch.complete}};
}

template <>
HarvestBatch from_json<HarvestBatch>(const json& j) {
    return guarded([&] {
        HarvestBatch batch;
        for (const auto& r : j.at("records")) batch.records.push_back(from_json<MetadataRecord>(r));
        if (!j.contains("token")) throw Error(ErrorCode::bad_query, "malformed message: missing token");
        batch.token = optional_string(j, "token");
        batch.complete = j.at("complete").get<bool>();
        return batch;
    });
}

json to_json(const DocumentBatch& batch) {
    json docs = json::array();
    for (const auto& doc : batch.documents) docs.push_back(to_json(doc));
    return json{{"documents", std::move(docs)},
                {"token", batch.token ? json(*batch.token) : json(nullptr)},
                {"complete", batch.complete}};
}

template <>
DocumentBatch from_json<DocumentBatch>(const json& j) {
    return guarded([&] {
        DocumentBatch batch;
        for (const auto& d : j.at("documents")) batch.documents.push_back(from_json<Document>(d));
        if (!j.contains("token")) throw Error(ErrorCode::bad_query, "malformed message: missing token");
        batch.token = optional_string(j, "token");
        batch.complete = j.at("complete").get<bool>();
        return batch;
    });
}

json to_json(const ChildInfo& child) {
    return json{{"domain", child.domain.str()},
                {"endpoint", child.endpoint},
                {"registered_at", format_datestamp(child.registered_at)}};
}

template <>
ChildInfo from_json<ChildInfo>(const json& j) {
    return guarded([&] {
        return ChildInfo{
            .domain = parse_domain(j.at("domain").get<std::string>()),
            .endpoint = j.at("endpoint").get<std::string>(),
            .registered_at = parse_datestamp(j.at("registered_at").get<std::string>()),
        };
    });
}

json to_json(const RegisterRequest& req) {
    return json{{"domain", req.domain.str()}, {"endpoint", req.endpoint}, {"collection", to_json(req.collection)}};
}

template <>
RegisterRequest from_json<RegisterRequest>(const json& j) {
    return guarded([&] {
        return RegisterRequest{
            .domain = parse_domain(j.at("domain").get<std::string>()),
            .endpoint = j.at("endpoint").get<std::string>(),
            .collection = from_json<CollectionDescription>(j.at("collection")),
        };
    });
}

json parse_body(std::string_view body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        bad_field(e);
    }
}

std::string error_body(ErrorCode code, std::string_view message) {
    return json{{"error", {{"code", to_string(code)}, {"message", message}}}}.dump();
}

Error error_from_body(int status, std::string_view body) {
    const auto j = json::parse(body, nullptr, false);
    if (j.is_object() && j.contains("error") && j["error"].is_object()) {
        const auto& e = j["error"];
        const auto code = e.contains("code") && e["code"].is_string()
                              ? error_code_from_string(e["code"].get<std::string>())
                              : ErrorCode::internal;
        const auto message = e.contains("message") && e["message"].is_string() ? e["message"].get<std::string>()
                                                                               : std::string("no message");
        return Error(code, message);
    }
    return Error(ErrorCode::internal, "HTTP " + std::to_string(status) + " without error body");
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << value.dump();
        if (!out) throw Error(ErrorCode::internal, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::internal, "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_body(buf.str());
}

// Token text: "t1-<snapshot>-<offset>-<watermark>-<checksum>", fields lowercase hex.

std::uint64_t TokenCodec::checksum(const TokenState& state) const {
    // FNV-1a over key and fields; detects foreign or edited tokens, not an authenticator.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    mix(key_);
    mix(std::to_string(state.snapshot.seconds));
    mix(std::to_string(state.offset));
    mix(std::to_string(state.watermark));
    return h;
}

std::string TokenCodec::mint(const TokenState& state) const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "t1-%llx-%llx-%llx-%016llx",
                  static_cast<unsigned long long>(state.snapshot.seconds),
                  static_cast<unsigned long long>(state.offset), static_cast<unsigned long long>(state.watermark),
                  static_cast<unsigned long long>(checksum(state)));
    return buf;
}

TokenState TokenCodec::parse(std::string_view token) const {
    auto reject = [&]() -> Error {
        return Error(ErrorCode::bad_token, "invalid resumption token '" + std::string(token) + "'");
    };
    if (!token.starts_with("t1-")) throw reject();
    std::string_view rest = token.substr(3);

    std::uint64_t fields[4];
    for (int i = 0; i < 4; ++i) {
        const auto dash = rest.find('-');
        const auto piece = rest.substr(0, dash);
        if ((dash == std::string_view::npos) != (i == 3) || piece.empty() || piece.size() > 16) throw reject();
        for (char c : piece) {
            if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) throw reject();
        }
        auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), fields[i], 16);
        if (ec != std::errc{} || ptr != piece.data() + piece.size()) throw reject();
        rest = dash == std::string_view::npos ? std::string_view{} : rest.substr(dash + 1);
    }
    TokenState state{.snapshot = {static_cast<std::int64_t>(fields[0])}, .offset = fields[1], .watermark = fields[2]};
    if (checksum(state) != fields[3]) throw reject();
    return state;
}

}  // namespace dris::wire
