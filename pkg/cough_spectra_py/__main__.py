import sys

from cough_spectra_py.cli import main


sys.exit(main())
