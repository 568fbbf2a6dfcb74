#include "fbmgen/hash.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <stdexcept>

namespace fbmgen {

namespace {

std::string to_hex(const unsigned char* d, unsigned len) {
	static const char* digits = "0123456789abcdef";
	std::string out(2 * len, '0');
	for (unsigned i = 0; i < len; ++i) {
		out[2 * i] = digits[d[i] >> 4];
		out[2 * i + 1] = digits[d[i] & 0xf];
	}
	return out;
}

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
	unsigned char md[EVP_MAX_MD_SIZE];
	unsigned md_len = 0;
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
	if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) ||
	    !EVP_DigestUpdate(ctx.get(), data, len) || !EVP_DigestFinal_ex(ctx.get(), md, &md_len))
		throw std::runtime_error("sha256 failed");
	return to_hex(md, md_len);
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot open " + path);
	unsigned char md[EVP_MAX_MD_SIZE];
	unsigned md_len = 0;
	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
	if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr))
		throw std::runtime_error("sha256 failed");
	char buf[1 << 16];
	while (in) {
		in.read(buf, sizeof buf);
		if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
	}
	if (!EVP_DigestFinal_ex(ctx.get(), md, &md_len)) throw std::runtime_error("sha256 failed");
	return to_hex(md, md_len);
}

}  // namespace fbmgen
