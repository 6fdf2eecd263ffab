// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

fn main() -> std::process::ExitCode {
    qutrit_assign::cli::main_with_args(std::env::args_os())
}
