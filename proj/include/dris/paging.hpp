#pragma once

#include "dris/error.hpp"
#include "dris/version_log.hpp"
#include "dris/wire.hpp"

#include <optional>
#include <string_view>

namespace dris {

/// One page of a resumable harvest over `log`. A pass without a token starts at
/// the log's current revision; its tokens pin that revision, so upserts landing
/// between pages neither shift nor duplicate anything within the pass.
template <class Out, class T, class Convert>
Out harvest_page(const VersionLog<T>& log, const wire::TokenCodec& tokens, Datestamp now,
                 std::int64_t token_ttl_seconds, Datestamp from, Datestamp until,
                 std::optional<std::string_view> token, std::size_t batch, Convert&& convert) {
    if (from > until) throw Error(ErrorCode::bad_datestamp, "'from' is later than 'until'");
    if (batch < 1 || batch > wire::max_batch) throw Error(ErrorCode::bad_query, "batch must be in [1, 10000]");

    wire::TokenState state{.snapshot = now, .offset = 0, .watermark = log.revision()};
    if (token) {
        state = tokens.parse(*token);
        if (state.watermark > log.revision() || state.snapshot > now) {
            throw Error(ErrorCode::bad_token, "resumption token was not issued by this node");
        }
        if (now - state.snapshot > token_ttl_seconds) throw Error(ErrorCode::bad_token, "resumption token expired");
    }

    Out out;
    if (from == until) return out;
    const auto p = log.page(from, until, state.watermark, state.offset, batch);
    for (const T* item : p.items) convert(out, *item);
    out.complete = p.complete;
    if (!p.complete) {
        state.offset += p.items.size();
        out.token = tokens.mint(state);
    }
    return out;
}

}  // namespace dris
