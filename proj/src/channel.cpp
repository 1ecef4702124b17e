#include "polar/channel.hpp"

namespace polar {

ChannelObservation transmit(const BitVec& x, const ChannelModel& model, RngStream& rng) {
    ChannelObservation obs;
    obs.llr.resize(x.size());
    if (model.kind == ChannelModel::Kind::BIAWGN) {
        const double s = model.sigma;
        const double scale = 2.0 / (s * s);
        for (size_t i = 0; i < x.size(); ++i) {
            double y = (x[i] ? -1.0 : 1.0) + s * rng.next_gaussian();
            obs.llr[i] = scale * y;
        }
    } else {
        obs.erased.resize(x.size());
        for (size_t i = 0; i < x.size(); ++i) {
            bool erase = rng.next_unit() <= model.epsilon;
            obs.erased[i] = erase;
            obs.llr[i] = erase ? 0.0 : (x[i] ? -kBecLlrSurrogate : kBecLlrSurrogate);
        }
    }
    return obs;
}

}  // namespace polar
