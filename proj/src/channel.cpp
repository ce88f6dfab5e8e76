#include "measfid/channel.hpp"

#include "measfid/errors.hpp"

namespace measfid {

void ContinuousChannel::transform_noise(double, std::span<const double>, std::span<double>) const {
    throw DomainError("channel does not support outcome sampling");
}

} // namespace measfid
