/*
 * Copyright 2026 The saf-emu authors
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

// Umbrella header: the whole library.

#include "saf/agent.hpp"
#include "saf/bytes.hpp"
#include "saf/config.hpp"
#include "saf/ddr.hpp"
#include "saf/errors.hpp"
#include "saf/ethertype.hpp"
#include "saf/fabric.hpp"
#include "saf/fcs32.hpp"
#include "saf/frame.hpp"
#include "saf/host.hpp"
#include "saf/interval_set.hpp"
#include "saf/kernels.hpp"
#include "saf/mac.hpp"
#include "saf/models.hpp"
#include "saf/payload.hpp"
#include "saf/pr_engine.hpp"
#include "saf/ptrans_bench.hpp"
#include "saf/raw_socket.hpp"
#include "saf/sha256.hpp"
#include "saf/sim_time.hpp"
