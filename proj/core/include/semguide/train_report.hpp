#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semguide {

struct TrainReport {
    std::vector<double> epoch_loss;      // mean training loss per epoch
    std::vector<double> epoch_val_loss;  // validation loss per epoch (same length)
    double final_val_loss = 0.0;
    std::size_t epochs_run = 0;
    std::uint64_t seed = 0;
};

/// Writes the `epoch,loss,val_loss` training log.
void write_train_log(const std::string& path, const TrainReport& report);

}  // namespace semguide
