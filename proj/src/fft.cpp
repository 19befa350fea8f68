#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace uwbrake::detail
{

namespace
{

class PlanCache
{
  public:
    ~PlanCache()
    {
        for (auto &[key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, FftDirection dir)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(n, dir);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        // FFTW_ESTIMATE leaves the scratch buffer untouched; FFTW_UNALIGNED
        // lets the plan run on any std::vector storage.
        std::vector<std::complex<double>> scratch(n);
        auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
        const int sign = dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr)
            throw std::runtime_error("FFTW failed to create a plan.");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, FftDirection>, fftw_plan> plans_;
};

PlanCache &plan_cache()
{
    static PlanCache cache;
    return cache;
}

} // namespace

void fft(std::vector<std::complex<double>> &data, FftDirection dir)
{
    if (data.empty())
        throw std::invalid_argument("FFT of an empty sequence.");
    fftw_plan plan = plan_cache().get(data.size(), dir);
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

} // namespace uwbrake::detail
