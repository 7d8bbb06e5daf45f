/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The ulsched authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ulsched {

/// Argument outside the domain of an operation. `argument()` names the culprit.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string argument, const std::string& what)
        : std::invalid_argument(argument + ": " + what), argument_(std::move(argument)) {}

    const std::string& argument() const noexcept { return argument_; }

private:
    std::string argument_;
};

/// No grant size up to the PRB limit reaches the requested volume.
class InfeasibleAllocation : public std::runtime_error {
public:
    InfeasibleAllocation(double required_bits, std::int64_t best_bits)
        : std::runtime_error("infeasible allocation: need " + std::to_string(required_bits) +
                             " bits per grant, largest grant carries " +
                             std::to_string(best_bits) + " (deficit " +
                             std::to_string(required_bits - static_cast<double>(best_bits)) +
                             " bits)"),
          required_bits_(required_bits), best_bits_(best_bits) {}

    double required_bits() const noexcept { return required_bits_; }
    std::int64_t best_bits() const noexcept { return best_bits_; }
    double deficit_bits() const noexcept { return required_bits_ - static_cast<double>(best_bits_); }

private:
    double required_bits_;
    std::int64_t best_bits_;
};

/// Persistent grants alone need more PRBs than the cell has in some subframe.
class OversubscriptionError : public std::runtime_error {
public:
    OversubscriptionError(std::int64_t subframe, int prbs, int capacity)
        : std::runtime_error("oversubscribed: subframe " + std::to_string(subframe) + " needs " +
                             std::to_string(prbs) + " persistent PRBs, cell has " +
                             std::to_string(capacity)),
          subframe_(subframe), prbs_(prbs), capacity_(capacity) {}

    std::int64_t worst_subframe() const noexcept { return subframe_; }
    int prbs() const noexcept { return prbs_; }
    int capacity() const noexcept { return capacity_; }

private:
    std::int64_t subframe_;
    int prbs_;
    int capacity_;
};

class CalibrationError : public std::runtime_error {
public:
    CalibrationError(double rate_residual, double bitrate_residual)
        : std::runtime_error("telemetry calibration failed: message-rate residual " +
                             std::to_string(rate_residual) + ", bit-rate residual " +
                             std::to_string(bitrate_residual)),
          rate_residual_(rate_residual), bitrate_residual_(bitrate_residual) {}

    double rate_residual() const noexcept { return rate_residual_; }
    double bitrate_residual() const noexcept { return bitrate_residual_; }

private:
    double rate_residual_;
    double bitrate_residual_;
};

class EmptySampleError : public std::runtime_error {
public:
    EmptySampleError() : std::runtime_error("no delay samples to summarize") {}
};

/// Malformed input file (TBS table, telemetry profile, sweep CSV).
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace ulsched
