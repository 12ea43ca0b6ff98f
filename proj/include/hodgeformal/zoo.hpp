#pragma once

// Textual identifiers for generated complexes:
//   sphere:N  torus:N  surface:G  product:A,B  connsum:A,B  file:PATH
// A and B are identifiers themselves; product/connsum nest left to right,
// e.g. product:product:sphere:1,sphere:1,sphere:1.

#include <cctype>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "complex.hpp"
#include "io.hpp"

namespace hodgeformal {

struct IdentifierError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

namespace detail {

class IdentifierParser
{
public:
    explicit IdentifierParser(std::string_view text) : text_(text) {}

    SimplicialComplex parse_all()
    {
        auto K = parse();
        if (pos_ != text_.size())
            fail("unexpected trailing text");
        return K;
    }

private:
    SimplicialComplex parse()
    {
        const auto colon = text_.find(':', pos_);
        if (colon == std::string_view::npos)
            fail("expected kind:argument");
        const std::string kind(text_.substr(pos_, colon - pos_));
        pos_ = colon + 1;
        if (kind == "sphere" || kind == "torus" || kind == "surface")
        {
            const int n = number();
            if (kind == "sphere")
                return guarded([&] { return sphere(n); });
            if (kind == "torus")
                return guarded([&] { return torus(n); });
            return guarded([&] { return surface(n); });
        }
        if (kind == "product" || kind == "connsum")
        {
            auto a = parse();
            if (pos_ >= text_.size() || text_[pos_] != ',')
                fail("expected ',' between the two factors");
            ++pos_;
            auto b = parse();
            if (kind == "product")
                return guarded([&] { return product_complex(a, b); });
            return guarded([&] { return connected_sum(a, b); });
        }
        if (kind == "file")
        {
            const auto end = text_.find(',', pos_);
            const std::string path(text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_));
            pos_ = end == std::string_view::npos ? text_.size() : end;
            if (path.empty())
                fail("empty file path");
            if (!std::filesystem::exists(path))
                throw IdentifierError("no such complex file: " + path);
            return io::load_complex(path);
        }
        fail("unknown kind '" + kind + "'");
    }

    int number()
    {
        const auto start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start || pos_ - start > 6)
            fail("expected a small nonnegative integer");
        return std::stoi(std::string(text_.substr(start, pos_ - start)));
    }

    template <class F>
    SimplicialComplex guarded(F&& make)
    {
        try
        {
            return make();
        }
        catch (const std::invalid_argument& e)
        {
            throw IdentifierError(std::string(text_) + ": " + e.what());
        }
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw IdentifierError("invalid complex identifier '" + std::string(text_) + "' at position " +
                              std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Build the complex named by `identifier`.
inline SimplicialComplex make_complex(std::string_view identifier)
{
    return detail::IdentifierParser(identifier).parse_all();
}

}  // namespace hodgeformal
