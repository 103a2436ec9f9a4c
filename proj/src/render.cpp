#include "tractscope/render.hpp"

#include <fstream>
#include <stdexcept>

namespace tractscope {

std::string render_ppm_bytes(const ScalarField& field) {
    const Window& w = field.window;
    std::string out = "P6\n" + std::to_string(w.nx) + " " + std::to_string(w.ny) +
                      "\n255\n";
    out.reserve(out.size() + 3 * static_cast<size_t>(w.nx) * w.ny);

    auto sign_at = [&](int i, int j) -> int {
        if (field.masked(i, j)) return 0;  // zeros of f sit on no tract
        return field.at(i, j) > 0.0 ? 1 : -1;
    };
    auto crossing = [&](int i, int j) {
        int s = sign_at(i, j);
        if (s == 0) return true;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d], nj = j + dj[d];
            if (ni < 0 || nj < 0 || ni >= w.nx || nj >= w.ny) continue;
            int sn = sign_at(ni, nj);
            if (sn != 0 && sn != s) return true;
        }
        return false;
    };

    for (int row = 0; row < w.ny; ++row) {
        int j = w.ny - 1 - row;  // row 0 = top of window (y_max)
        for (int i = 0; i < w.nx; ++i) {
            unsigned char v;
            if (crossing(i, j)) v = 0;
            else v = (sign_at(i, j) > 0) ? 255 : 64;
            out.push_back(static_cast<char>(v));
            out.push_back(static_cast<char>(v));
            out.push_back(static_cast<char>(v));
        }
    }
    return out;
}

void write_ppm(const ScalarField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    std::string bytes = render_ppm_bytes(field);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace tractscope
