// core/include/mvae/wav.hpp

// Copyright 2026  The mvae Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MVAE_WAV_HPP_
#define MVAE_WAV_HPP_

#include <filesystem>

#include "mvae/stft.hpp"

namespace mvae {

enum class WavEncoding { kPcm16, kFloat32 };

// Reads PCM 16-bit or IEEE float 32-bit RIFF/WAVE (plain or extensible
// format chunk). PCM samples are scaled by 1/32768.
// Throws IoError if the file cannot be opened, FormatError if it does not
// parse.
Waveform ReadWav(const std::filesystem::path& path);

// PCM16 output is clipped to [-1, 1 - 2^-15].
void WriteWav(const std::filesystem::path& path, const Waveform& wav,
              WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace mvae

#endif  // MVAE_WAV_HPP_
