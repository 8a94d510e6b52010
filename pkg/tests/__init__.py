# Tests for rician_lowsnr
