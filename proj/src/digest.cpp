#include "trivia/digest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "trivia/error.hpp"

namespace trivia {
namespace {

struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

CtxPtr new_sha256_ctx() {
    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::config, "cannot initialize SHA-256");
    }
    return ctx;
}

Digest finish(CtxPtr ctx) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
        throw Error(ErrorKind::config, "SHA-256 finalization failed");
    }
    return out;
}

} // namespace

Digest sha256(std::span<const std::uint8_t> bytes) {
    auto ctx = new_sha256_ctx();
    if (!bytes.empty() && EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1) {
        throw Error(ErrorKind::config, "SHA-256 update failed");
    }
    return finish(std::move(ctx));
}

Digest sha256_str(std::string_view s) {
    return sha256({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

Digest sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open '" + path.string() + "' for hashing");

    auto ctx = new_sha256_ctx();
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(got)) != 1) {
            throw Error(ErrorKind::config, "SHA-256 update failed");
        }
    }
    return finish(std::move(ctx));
}

std::string to_hex(const Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(d.size() * 2);
    for (auto b : d) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0x0F]);
    }
    return out;
}

} // namespace trivia
