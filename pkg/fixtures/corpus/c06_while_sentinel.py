def rain():
    total = 0
    count = 0
    line = input("First rainfall (-999 stops): ")
    while line != "-999":
        try:
            value = float(line)
            if value >= 0:
                total += value
                count += 1
        except ValueError:
            pass
        line = input("Next rainfall (-999 stops): ")
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
