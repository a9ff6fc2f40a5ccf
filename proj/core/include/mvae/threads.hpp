// core/include/mvae/threads.hpp

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

#ifndef MVAE_THREADS_HPP_
#define MVAE_THREADS_HPP_

namespace mvae {

// Worker threads used for frame- and bin-parallel loops. Results do not
// depend on this value. n <= 0 selects all available cores.
void SetThreadCount(int n);
int ThreadCount();

}  // namespace mvae

#endif  // MVAE_THREADS_HPP_
