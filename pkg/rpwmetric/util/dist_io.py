import json
import os
import tempfile

import numpy as np
import pandas as pd
from PIL import Image

from rpwmetric.modules.distributions import from_points
from rpwmetric.util.check_args import file_check
from rpwmetric.util.utils import PROFILE_COLS

IMAGE_EXTENSIONS = ['.pgm', '.png', '.jpg', '.jpeg', '.bmp', '.tif', '.tiff']


def read_distribution(file):
    """
    read a distribution CSV: one row per atom, coordinate columns x_1..x_d and a
    mass column. Masses are rescaled to sum to 1.

    :param file: path to the CSV
    :return: DiscreteDistribution
    """
    file_check(file, 'distribution file')
    try:
        df = pd.read_csv(file)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as err:
        raise IOError('could not parse distribution file {}: {}'.format(file, err))
    coords = [col for col in df.columns if col.startswith('x_')]
    if 'mass' not in df.columns or not coords:
        raise IOError('distribution file {} needs columns x_1..x_d and mass, got {}'.format(
            file, list(df.columns)))
    coords = sorted(coords, key=lambda col: int(col[2:]) if col[2:].isdigit() else col)
    try:
        points = df[coords].astype(float).values
        masses = df['mass'].astype(float).values
    except ValueError as err:
        raise IOError('non-numeric entry in distribution file {}: {}'.format(file, err))
    return from_points(points, masses)


def write_distribution(dist, outfile):
    """
    write a distribution in the CSV layout read by read_distribution

    :param dist: DiscreteDistribution
    :param outfile: path
    :return: None
    """
    write_table(dist.to_frame(), outfile, float_format='%.17g')


def read_image(file):
    """
    read an intensity grid: PGM (P2 or P5) or any Pillow-readable image, or a
    CSV of intensities without header. Color images keep their channels;
    from_image averages them.

    :param file: path
    :return: ndarray (H, W) or (H, W, C)
    """
    file_check(file, 'image file')
    ext = os.path.splitext(file)[1].lower()
    if ext == '.csv':
        try:
            pixels = pd.read_csv(file, header=None).values.astype(float)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as err:
            raise IOError('could not parse intensity grid {}: {}'.format(file, err))
        return pixels
    if ext not in IMAGE_EXTENSIONS:
        raise IOError('unsupported image format {}; expected .csv or one of {}'.format(ext, IMAGE_EXTENSIONS))
    # PIL raises OSError subclasses for unreadable files
    with Image.open(file) as img:
        if img.mode not in ('L', 'I', 'I;16', 'F', 'RGB'):
            img = img.convert('RGB')
        return np.asarray(img, dtype=np.float64)


def write_pgm(pixels, outfile):
    """
    write a grayscale grid as binary PGM (values are clipped to 0..255)

    :param pixels: array (H, W)
    :param outfile: path
    :return: None
    """
    data = np.clip(np.rint(np.asarray(pixels, dtype=np.float64)), 0, 255).astype(np.uint8)
    Image.fromarray(data).save(outfile, format='PPM')


def read_labels(directory):
    """
    read labels.csv of a retrieval corpus

    :param directory: corpus directory holding labels.csv
    :return: DataFrame with columns id, label, path (paths made absolute)
    """
    file = os.path.join(directory, 'labels.csv')
    file_check(file, 'corpus label file')
    try:
        df = pd.read_csv(file, dtype=str)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as err:
        raise IOError('could not parse {}: {}'.format(file, err))
    missing = {'id', 'label', 'path'} - set(df.columns)
    if missing:
        raise IOError('{} is missing columns {}'.format(file, sorted(missing)))
    df = df.dropna(subset=['id', 'label', 'path'])
    df['path'] = [os.path.join(directory, path) for path in df['path']]
    return df[['id', 'label', 'path']].reset_index(drop=True)


def atomic_write(outfile, writer):
    """
    call writer(tmp_path), then move the temporary file over outfile;
    nothing is left behind if writer fails
    """
    directory = os.path.dirname(os.path.abspath(outfile))
    fd, tmp = tempfile.mkstemp(prefix='.tmp_', dir=directory)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, outfile)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_table(df, outfile, float_format='%.12g'):
    """
    write a result table as CSV (no index)

    :param df: DataFrame
    :param outfile: path
    :param float_format: format of float columns
    :return: None
    """
    atomic_write(outfile, lambda tmp: df.to_csv(tmp, index=False, float_format=float_format))


def write_json(record, outfile=None):
    """
    dump a result record as JSON, to outfile or (if None) as a string

    :param record: dict
    :param outfile: optional path
    :return: the JSON text
    """
    text = json.dumps(record, sort_keys=True)
    if outfile is not None:
        def writer(tmp):
            with open(tmp, 'w') as handle:
                handle.write(text + '\n')
        atomic_write(outfile, writer)
    return text


def write_profile(profile, outfile):
    """
    export an OTProfile as CSV with columns mass, p_power_cost, wp_value

    :param profile: OTProfile
    :param outfile: path
    :return: None
    """
    write_table(profile.to_frame()[PROFILE_COLS], outfile, float_format='%.17g')
