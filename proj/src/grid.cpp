#include "sparsep/grid.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace sparsep
{

double SpectrogramGrid::max_value() const noexcept
{
    double m = 0.0;
    for (double v : values)
        m = std::max(m, v);
    return m;
}

void write_pgm(const SpectrogramGrid& grid, const std::filesystem::path& path,
               double dynamic_range_db)
{
    if (!(dynamic_range_db > 0.0))
        throw DomainError("dynamic range must be positive");
    const double peak = grid.max_value();

    std::string pixels(grid.bins * grid.frames, static_cast<char>(255));
    if (peak > 0.0)
    {
        for (std::size_t b = 0; b < grid.bins; ++b)
        {
            const std::size_t row = grid.bins - 1 - b;
            for (std::size_t t = 0; t < grid.frames; ++t)
            {
                const double v = grid.at(b, t);
                double level = 0.0;
                if (v > 0.0)
                    level = std::clamp(1.0 + 20.0 * std::log10(v / peak) / dynamic_range_db, 0.0, 1.0);
                pixels[row * grid.frames + t] =
                    static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - level))));
            }
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "P5\n" << grid.frames << ' ' << grid.bins << "\n255\n";
    out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

}  // namespace sparsep
